//! Noise, corruptions and outliers together. The row space is only
//! recovered approximately. Takes about a minute in release mode.

use lrr::cli::replicate::{fig6, FIG6_LAMBDA};

fn main() -> lrr::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let rep = fig6(seed)?;
    let ds = &rep.dataset;
    println!("X is {:?}, ||E0||/||X0|| = {:.3}", ds.dim(), ds.error_ratio());
    println!("noise level {:.4}", rep.noise_level);
    println!(
        "lambda {FIG6_LAMBDA}: recovery error {:.3}, rank(Z*) {}, {:.0} s",
        rep.run.recovery_error, rep.run.rank, rep.run.seconds
    );
    println!("planted-column AUC {:.3}", rep.run.auc);
    Ok(())
}
