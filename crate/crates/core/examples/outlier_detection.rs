//! Outliers show up as the non-zero columns of `E*`.
//!
//! Rebuilds the outlier experiment (5 subspaces, 200 authentic samples, 50
//! outliers), solves at one lambda and thresholds the column norms.

use lrr::cluster::detect_outliers;
use lrr::cli::replicate::{fig4_data, norm_separation, planted_auc};
use lrr::eval::recovery_error;
use lrr::linalg::column_norms;
use lrr::solver::{solve_lrr_self, ErrorModel, SolverOptions};

fn main() -> lrr::Result<()> {
    let ds = fig4_data(0)?;
    println!("X is {:?}, outliers at {:?}..", ds.dim(), &ds.outlier_indices[..3]);

    let sol = solve_lrr_self(&ds.x, ErrorModel::L21, &SolverOptions::new(0.25))?;
    println!("converged={} after {} iterations", sol.converged, sol.iterations);
    println!("recovery error {:.2e}", recovery_error(&sol.z, &ds.v0)?);

    let (clean, planted) = norm_separation(&sol.e, &ds.outlier_indices);
    println!("largest clean ||E_i|| {clean:.3e}, smallest outlier ||E_i|| {planted:.3e}");

    let delta = 0.5 * (clean + planted);
    let found = detect_outliers(&sol.e, delta)?;
    println!("delta={delta:.3}: {} detected, exact={}", found.len(), found == ds.outlier_indices);
    println!("AUC {}", planted_auc(&sol.e, &ds.outlier_indices)?);

    let norms = column_norms(&sol.e);
    println!("first authentic norms {:.1e} {:.1e}", norms[0], norms[1]);
    Ok(())
}
