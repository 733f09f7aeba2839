//! The three shrinkage operators used inside the solver.
//!
//! ```text
//! cargo run --release --example proximal_operators
//! ```

use lrr::linalg::{column_norms, column_shrink, entry_shrink, singular_values, svt};
use ndarray::array;

fn main() -> lrr::Result<()> {
    let q = array![[3.0, 0.2, -1.5], [4.0, -0.1, 0.5]];
    println!("Q =\n{q}");

    // soft-thresholds every entry by alpha
    println!("\nentry_shrink(Q, 0.5) =\n{}", entry_shrink(&q, 0.5));

    // columns shorter than alpha vanish, the rest lose alpha of their length
    let cs = column_shrink(&q, 1.0);
    println!("\ncolumn_shrink(Q, 1.0) =\n{cs}");
    println!("column norms before {} after {}", column_norms(&q), column_norms(&cs));

    let s = svt(&q, 1.0)?;
    println!("\nsingular values of Q          {}", singular_values(&q)?);
    println!("singular values of svt(Q, 1)  {}", singular_values(&s)?);
    Ok(())
}
