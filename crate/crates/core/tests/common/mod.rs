#![allow(dead_code)]

use lrr::linalg::{l21_norm, nuclear_norm, skinny_svd, Matrix};
use ndarray::{Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn gaussian<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(rng))
}

fn objective(x: &Matrix, a: &Matrix, z: &Matrix, lambda: f64) -> f64 {
    nuclear_norm(z).unwrap() + lambda * l21_norm(&(x - &a.dot(z)))
}

/// Best objective of `||Z||_* + lambda ||X - A Z||_{2,1}` found by a
/// subgradient method with normalized diminishing steps, restarted from the
/// best point with a halved radius.
pub fn subgradient_oracle(x: &Matrix, a: &Matrix, lambda: f64, iters_per_round: usize) -> f64 {
    let mut best_z = Matrix::zeros((a.ncols(), x.ncols()));
    let mut best = objective(x, a, &best_z, lambda);
    let mut radius = 1.0;
    for _ in 0..12 {
        let mut z = best_z.clone();
        for k in 0..iters_per_round {
            let svd = skinny_svd(&z, 1e-12).unwrap();
            let mut g = svd.u.dot(&svd.v.t());
            let mut r = x - &a.dot(&z);
            for mut col in r.axis_iter_mut(Axis(1)) {
                let n = col.dot(&col).sqrt();
                if n > 1e-14 {
                    col.mapv_inplace(|v| v / n);
                } else {
                    col.fill(0.0);
                }
            }
            g = g - a.t().dot(&r) * lambda;
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn == 0.0 {
                break;
            }
            z = z - g * (radius / (gn * ((k + 1) as f64).sqrt()));
            let f = objective(x, a, &z, lambda);
            if f < best {
                best = f;
                best_z = z.clone();
            }
        }
        radius *= 0.5;
    }
    best
}
