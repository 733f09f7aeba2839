//! A low-rank dictionary can be swapped for an orthogonalized one of size
//! `rank(A)`; the solution is mapped back afterwards.

use std::time::Instant;

use lrr::linalg::{frobenius_norm, Matrix};
use lrr::solver::{reduce_dictionary, solve_lrr, solve_lrr_reduced, ErrorModel, SolverOptions};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(rng))
}

fn main() -> lrr::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = gaussian(80, 5, &mut rng).dot(&gaussian(5, 120, &mut rng));
    let x = a.dot(&gaussian(120, 100, &mut rng)) + gaussian(80, 100, &mut rng) * 0.01;
    let red = reduce_dictionary(&a)?;
    println!("A is {:?} of rank {}, B = A P is {:?}", a.dim(), red.rank, red.b.dim());

    let opts = SolverOptions::new(0.5);
    let t = Instant::now();
    let direct = solve_lrr(&x, &a, ErrorModel::L21, &opts)?;
    let t_direct = t.elapsed();
    let t = Instant::now();
    let reduced = solve_lrr_reduced(&x, &a, ErrorModel::L21, &opts)?;
    let t_reduced = t.elapsed();

    println!("direct  {:>8.1?}  objective {:.6}", t_direct, direct.objective);
    println!("reduced {:>8.1?}  objective {:.6}", t_reduced, reduced.objective);
    println!(
        "||Z_direct - Z_reduced|| / ||Z_direct|| = {:.1e}",
        frobenius_norm(&(&direct.z - &reduced.z)) / frobenius_norm(&direct.z)
    );
    Ok(())
}
