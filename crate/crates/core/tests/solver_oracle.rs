//! Inexact ALM against an independent subgradient method on tiny problems,
//! plus regressions for inputs that once broke the solver.

mod common;

use common::{gaussian, subgradient_oracle};
use lrr::linalg::{l21_norm, nuclear_norm, row_space_projector};
use lrr::solver::{solve_lrr, solve_lrr_self, ErrorModel, SolverOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn alm_matches_subgradient_oracle() {
    let lambda = 0.5;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian(8, 10, &mut rng);
        let sol = solve_lrr_self(&x, ErrorModel::L21, &SolverOptions::new(lambda)).unwrap();
        assert!(sol.converged);
        let alm = nuclear_norm(&sol.z).unwrap() + lambda * l21_norm(&(&x - &x.dot(&sol.z)));
        let oracle = subgradient_oracle(&x, &x, lambda, 4_000);
        let rel = (alm - oracle).abs() / oracle;
        println!("seed {seed}: alm {alm:.8} oracle {oracle:.8} rel {rel:.2e}");
        assert!(rel <= 1e-3, "seed {seed}: relative gap {rel:.2e}");
    }
}

#[test]
fn general_dictionary_solution_lies_in_row_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let a = gaussian(12, 4, &mut rng).dot(&gaussian(4, 15, &mut rng));
    let x = gaussian(12, 9, &mut rng);
    let sol = solve_lrr(&x, &a, ErrorModel::L21, &SolverOptions::new(0.3)).unwrap();
    assert!(sol.converged);
    let p = row_space_projector(&a).unwrap();
    let off = lrr::linalg::max_abs(&(&sol.z - &p.dot(&sol.z)));
    assert!(off <= 1e-4, "{off}");
}

#[test]
fn rank_deficient_svt_input_does_not_break_the_solver() {
    // this solve once produced NaN singular vectors inside the iteration
    let ds = lrr::cli::replicate::fig3_data(1).unwrap();
    let sol = solve_lrr_self(&ds.x, ErrorModel::L21, &SolverOptions::new(1.0)).unwrap();
    assert!(sol.z.iter().all(|v| v.is_finite()));
    assert!(sol.converged);
}
