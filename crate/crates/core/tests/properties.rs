//! Randomized invariants of the linear algebra, clustering and metric code.

mod common;

use common::gaussian;
use lrr::cluster::{detect_outliers, estimate_k, laplacian_spectrum, Affinity};
use lrr::eval::{
    auc, rank_r_error_level, recovery_error, segmentation_accuracy, AccuracyStrategy, LabeledPrediction,
    ScoredBinary,
};
use lrr::linalg::{
    column_norms, column_shrink, entry_shrink, frobenius_norm, l21_norm, max_abs_diff, norm, nuclear_norm,
    pseudoinverse, singular_values, skinny_svd, svt, Matrix, MatrixNorm,
};
use ndarray::Axis;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn orthogonal(n: usize, r: &mut ChaCha8Rng) -> Matrix {
    skinny_svd(&gaussian(n, n, r), 1e-12).unwrap().u
}

fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
    max_abs_diff(&a.view(), &b.view()) <= tol * (1.0 + frobenius_norm(a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn svt_is_unitarily_invariant(seed in any::<u64>(), d in 2usize..7, n in 2usize..7, theta in 0.01f64..2.0) {
        let mut r = rng(seed);
        let m = gaussian(d, n, &mut r);
        let (q, p) = (orthogonal(d, &mut r), orthogonal(n, &mut r));
        let lhs = svt(&q.dot(&m).dot(&p), theta).unwrap();
        let rhs = q.dot(&svt(&m, theta).unwrap()).dot(&p);
        prop_assert!(close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn svt_soft_thresholds_singular_values(seed in any::<u64>(), d in 1usize..7, n in 1usize..7, theta in 0.0f64..2.0) {
        let m = gaussian(d, n, &mut rng(seed));
        let before = singular_values(&m).unwrap();
        let after = singular_values(&svt(&m, theta).unwrap()).unwrap();
        for (b, a) in before.iter().zip(after.iter()) {
            prop_assert!((a - (b - theta).max(0.0)).abs() <= 1e-10 * (1.0 + b));
        }
    }

    #[test]
    fn column_shrink_keeps_directions(seed in any::<u64>(), d in 1usize..6, n in 1usize..6, alpha in 0.0f64..3.0) {
        let q = gaussian(d, n, &mut rng(seed));
        let w = column_shrink(&q, alpha);
        let (nq, nw) = (column_norms(&q), column_norms(&w));
        for j in 0..n {
            prop_assert!((nw[j] - (nq[j] - alpha).max(0.0)).abs() <= 1e-12 * (1.0 + nq[j]));
            if nw[j] > 0.0 {
                let cos = q.column(j).dot(&w.column(j)) / (nq[j] * nw[j]);
                prop_assert!((cos - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn entry_shrink_never_grows_or_flips(seed in any::<u64>(), alpha in 0.0f64..2.0) {
        let q = gaussian(4, 5, &mut rng(seed));
        let w = entry_shrink(&q, alpha);
        for (a, b) in q.iter().zip(w.iter()) {
            prop_assert!(b.abs() <= a.abs());
            prop_assert!(*b == 0.0 || b.signum() == a.signum());
            prop_assert!((a - b).abs() <= alpha + 1e-15);
        }
    }

    #[test]
    fn pseudoinverse_is_an_involution(seed in any::<u64>(), d in 1usize..7, n in 1usize..7, r in 1usize..4) {
        let mut g = rng(seed);
        let m = gaussian(d, r, &mut g).dot(&gaussian(r, n, &mut g));
        let back = pseudoinverse(&pseudoinverse(&m).unwrap()).unwrap();
        prop_assert!(close(&back, &m, 1e-8));
    }

    #[test]
    fn norms_are_norms(seed in any::<u64>(), c in -3.0f64..3.0) {
        let mut g = rng(seed);
        let (a, b) = (gaussian(4, 6, &mut g), gaussian(4, 6, &mut g));
        for kind in [MatrixNorm::Nuclear, MatrixNorm::L21, MatrixNorm::L1, MatrixNorm::Frobenius, MatrixNorm::Spectral] {
            let n = |m: &Matrix| norm(m, kind).unwrap();
            prop_assert!(n(&(&a + &b)) <= n(&a) + n(&b) + 1e-12);
            prop_assert!((n(&(&a * c)) - c.abs() * n(&a)).abs() <= 1e-12 * (1.0 + n(&a)));
            prop_assert!(n(&a) > 0.0);
        }
        prop_assert!(nuclear_norm(&a).unwrap() >= frobenius_norm(&a) - 1e-12);
        prop_assert!(l21_norm(&a) >= frobenius_norm(&a) - 1e-12);
    }

    #[test]
    fn estimated_k_ignores_node_order(seed in any::<u64>(), blocks in 1usize..5, size in 1usize..5) {
        let mut g = rng(seed);
        let n = blocks * size;
        let mut w = Matrix::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                if i / size == j / size {
                    w[[i, j]] = 0.5 + g.random::<f64>();
                }
            }
        }
        let w = (&w + &w.t()) * 0.5;
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut g);
        let shuffled = w.select(Axis(0), &perm).select(Axis(1), &perm);
        let k = |m: Matrix| estimate_k(&laplacian_spectrum(&Affinity::from_matrix(m).unwrap()).unwrap(), 0.08).unwrap();
        prop_assert_eq!(k(w), k(shuffled));
    }

    #[test]
    fn detection_shrinks_as_delta_grows(seed in any::<u64>(), d1 in 0.01f64..3.0, d2 in 0.01f64..3.0) {
        let e = gaussian(3, 12, &mut rng(seed));
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let big = detect_outliers(&e, lo).unwrap();
        let small = detect_outliers(&e, hi).unwrap();
        prop_assert!(small.iter().all(|i| big.contains(i)));
    }

    #[test]
    fn local_accuracy_bounds_global(pred in proptest::collection::vec(0usize..4, 1..14), seed in any::<u64>()) {
        let mut g = rng(seed);
        let truth: Vec<usize> = pred.iter().map(|_| g.random_range(0..4)).collect();
        let p = LabeledPrediction::new(pred, truth, 4, 4).unwrap();
        let global = segmentation_accuracy(&p, AccuracyStrategy::Global).unwrap();
        let local = segmentation_accuracy(&p, AccuracyStrategy::Local).unwrap();
        prop_assert!(local >= global - 1e-15);
        prop_assert!((0.0..=1.0).contains(&global));
    }

    #[test]
    fn auc_depends_only_on_order(scores in proptest::collection::vec(-5.0f64..5.0, 2..30), seed in any::<u64>()) {
        let mut g = rng(seed);
        let mut truth: Vec<bool> = scores.iter().map(|_| g.random()).collect();
        truth[0] = true;
        truth[1] = false;
        let base = auc(&ScoredBinary::new(scores.clone(), truth.clone()).unwrap()).unwrap();
        let mapped: Vec<f64> = scores.iter().map(|s| (0.7 * s).exp() + 3.0).collect();
        let other = auc(&ScoredBinary::new(mapped, truth.clone()).unwrap()).unwrap();
        prop_assert!((base - other).abs() <= 1e-12);
        let flipped: Vec<bool> = truth.iter().map(|t| !t).collect();
        let complement = auc(&ScoredBinary::new(scores, flipped).unwrap()).unwrap();
        prop_assert!((base + complement - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn recovery_error_sees_only_subspaces(seed in any::<u64>(), n in 4usize..9, r in 1usize..4) {
        let mut g = rng(seed);
        let z = gaussian(n, r, &mut g).dot(&gaussian(r, n, &mut g));
        let v0 = skinny_svd(&gaussian(n, r, &mut g), 1e-12).unwrap().u;
        let base = recovery_error(&z, &v0).unwrap();
        let rotated = recovery_error(&z.dot(&orthogonal(n, &mut g)), &v0.dot(&orthogonal(r, &mut g))).unwrap();
        prop_assert!((base - rotated).abs() <= 1e-8);
        let exact = recovery_error(&z, &skinny_svd(&z, 1e-10).unwrap().u).unwrap();
        prop_assert!(exact <= 1e-7);
    }

    #[test]
    fn rank_r_error_is_non_increasing(seed in any::<u64>(), d in 1usize..8, n in 1usize..8) {
        let x = gaussian(d, n, &mut rng(seed));
        let levels: Vec<f64> = (1..=d.min(n)).map(|r| rank_r_error_level(&x, r).unwrap()).collect();
        prop_assert!(levels.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        prop_assert!(levels.last().unwrap().abs() <= 1e-7);
    }
}
