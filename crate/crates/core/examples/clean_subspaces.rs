//! Noise-free data from independent subspaces: the lowest-rank
//! representation is the shape interaction matrix `V0 V0^T`, and it is
//! block diagonal.

use lrr::linalg::frobenius_norm;
use lrr::solver::{solve_lrr_clean, solve_lrr_self, ErrorModel, SolverOptions};
use lrr::synth::{gen_ensemble, sample, SubspaceMode};

fn main() -> lrr::Result<()> {
    let ens = gen_ensemble(5, 4, 100, SubspaceMode::Independent, 7)?;
    let ds = sample(&ens, 20, 8)?;
    let sim = ds.shape_interaction();

    let closed = solve_lrr_clean(&ds.x, &ds.x)?;
    let iterative = solve_lrr_self(&ds.x, ErrorModel::L21, &SolverOptions::new(1e3))?;
    let rel = |z: &lrr::linalg::Matrix| frobenius_norm(&(z - &sim)) / frobenius_norm(&sim);
    println!("closed form   ||Z - VV^T|| / ||VV^T|| = {:.2e}", rel(&closed));
    println!(
        "inexact ALM   ||Z - VV^T|| / ||VV^T|| = {:.2e}  ({} iterations)",
        rel(&iterative.z),
        iterative.iterations
    );

    let mut off = 0.0;
    for i in 0..ds.x.ncols() {
        for j in 0..ds.x.ncols() {
            if ds.true_labels[i] != ds.true_labels[j] {
                off += iterative.z[[i, j]].powi(2);
            }
        }
    }
    println!(
        "off-block mass fraction = {:.2e}",
        off.sqrt() / frobenius_norm(&iterative.z)
    );
    Ok(())
}
