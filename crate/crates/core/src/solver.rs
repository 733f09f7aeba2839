//! Inexact ALM solver for `min ||Z||_* + lambda ||E||_l  s.t.  X = A Z + E`.
//!
//! The problem is split with an auxiliary `J = Z` and minimized one block at
//! a time:
//!
//! 1. `J = svt(Z + Y2/mu, 1/mu)`
//! 2. `Z = (I + A^T A)^{-1} (A^T (X - E) + J + (A^T Y1 - Y2)/mu)`
//! 3. `E = prox_{lambda/mu ||.||_l}(X - A Z + Y1/mu)`
//! 4. `Y1 += mu (X - A Z - E)`, `Y2 += mu (Z - J)`
//! 5. `mu = min(rho mu, mu_max)`
//!
//! and stops once both constraint residuals drop below `eps` in max-abs.
//! `(I + A^T A)` is constant, so its inverse is formed once from a Cholesky
//! factorization before the loop.
//!
//! Since every minimizer lies in the row space of `A`, the dictionary can be
//! replaced by `B = A P` with `P` an orthonormal basis of `span(A^T)`; see
//! [`reduce_dictionary`]. [`solve_lrr_self`] takes that path automatically
//! when it shrinks the problem.

use ndarray::{Array2, ArrayBase, Data, Ix2};
use serde::{Deserialize, Serialize};

use crate::error::{LrrError, Result};
use crate::linalg::{
    self, column_shrink, entry_shrink, frobenius_norm, l21_norm, max_abs, nuclear_norm,
    pseudoinverse, skinny_svd_default, spd_inverse, Matrix,
};

/// Relative residual allowed by [`solve_lrr_clean`] for `X` to count as
/// lying in the span of the dictionary.
pub const CLEAN_FEASIBILITY_TOL: f64 = 1e-6;

/// The reduced dictionary is used when `rank(A) < REDUCTION_RATIO * min(d, n_A)`.
pub const REDUCTION_RATIO: f64 = 0.8;

/// Norm applied to the error term `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModel {
    /// `||E||_{2,1}`: sample-specific corruptions and outliers.
    L21,
    /// `||E||_1`: random entry corruptions.
    L1,
    /// `||E||_F^2`: small dense noise.
    FrobeniusSq,
}

impl ErrorModel {
    /// Value of the error penalty (without `lambda`).
    pub fn penalty<S: Data<Elem = f64>>(&self, e: &ArrayBase<S, Ix2>) -> f64 {
        match self {
            ErrorModel::L21 => l21_norm(e),
            ErrorModel::L1 => e.iter().map(|x| x.abs()).sum(),
            ErrorModel::FrobeniusSq => e.iter().map(|x| x * x).sum(),
        }
    }

    /// Minimizer of `(lambda/mu) penalty(E) + 1/2 ||E - G||_F^2`.
    fn prox(&self, g: &Matrix, lambda: f64, mu: f64) -> Matrix {
        match self {
            ErrorModel::L21 => column_shrink(g, lambda / mu),
            ErrorModel::L1 => entry_shrink(g, lambda / mu),
            // lambda ||E||^2 + mu/2 ||E - G||^2 is minimized at mu G / (2 lambda + mu)
            ErrorModel::FrobeniusSq => g * (mu / (2.0 * lambda + mu)),
        }
    }
}

impl std::str::FromStr for ErrorModel {
    type Err = LrrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l21" => Ok(ErrorModel::L21),
            "l1" => Ok(ErrorModel::L1),
            "fro" | "frobenius" | "frobenius_sq" => Ok(ErrorModel::FrobeniusSq),
            other => Err(LrrError::InvalidArgument(format!(
                "unknown error model `{other}` (expected l21, l1 or frobenius_sq)"
            ))),
        }
    }
}

/// Parameters of the inexact ALM iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Weight of the error term.
    pub lambda: f64,
    pub mu_init: f64,
    pub mu_max: f64,
    pub rho: f64,
    /// Convergence threshold on both max-abs constraint residuals.
    pub eps: f64,
    pub max_iters: usize,
    /// Unused by the deterministic iteration; carried for reproducibility records.
    pub seed: u64,
}

impl SolverOptions {
    /// Defaults `mu = 1e-6`, `mu_max = 1e6`, `rho = 1.1`, `eps = 1e-8`,
    /// `max_iters = 1000`.
    pub fn new(lambda: f64) -> Self {
        SolverOptions {
            lambda,
            mu_init: 1e-6,
            mu_max: 1e6,
            rho: 1.1,
            eps: 1e-8,
            max_iters: 1000,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(LrrError::InvalidArgument(what.to_string()));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be positive and finite");
        }
        if !(self.mu_init > 0.0 && self.mu_max.is_finite() && self.mu_init <= self.mu_max) {
            return bad("require 0 < mu_init <= mu_max < inf");
        }
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return bad("rho must exceed 1");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        Ok(())
    }

    /// Penalty after `k` updates: `min(rho^k mu_init, mu_max)`.
    pub fn mu_at(&self, k: usize) -> f64 {
        let mut mu = self.mu_init;
        for _ in 0..k {
            mu = (self.rho * mu).min(self.mu_max);
        }
        mu
    }
}

/// Minimizer pair with solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LrrSolution {
    /// `n_A x n` representation.
    pub z: Matrix,
    /// `d x n` error term.
    pub e: Matrix,
    pub iterations: usize,
    pub converged: bool,
    /// `(||X - A Z - E||_inf, ||Z - J||_inf)` at the last iterate. On the
    /// reduced path these refer to the reduced variables.
    pub final_residuals: (f64, f64),
    /// `||Z||_* + lambda * penalty(E)`.
    pub objective: f64,
    /// `||J||_* + lambda * penalty(E)` after every iteration.
    pub objective_trace: Vec<f64>,
    /// Whether the reduced dictionary was used.
    pub reduced: bool,
}

/// Orthonormal row-space basis of a dictionary and the reduced dictionary.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDictionary {
    /// `d x r_A`, equal to `A P`.
    pub b: Matrix,
    /// `n_A x r_A` with orthonormal columns spanning `span(A^T)`.
    pub p_star: Matrix,
    pub rank: usize,
}

impl ReducedDictionary {
    /// Maps a reduced representation back: `Z = P Z~`.
    pub fn lift(&self, z_reduced: &Matrix) -> Matrix {
        self.p_star.dot(z_reduced)
    }
}

/// Orthogonalizes the columns of `A^T`.
pub fn reduce_dictionary<S: Data<Elem = f64>>(a: &ArrayBase<S, Ix2>) -> Result<ReducedDictionary> {
    let svd = skinny_svd_default(a)?;
    if svd.rank() == 0 {
        return Err(LrrError::Degenerate("dictionary is the zero matrix".into()));
    }
    let rank = svd.rank();
    let b = a.dot(&svd.v);
    Ok(ReducedDictionary {
        b,
        p_star: svd.v,
        rank,
    })
}

struct AlmOutput {
    z: Matrix,
    e: Matrix,
    iterations: usize,
    converged: bool,
    residuals: (f64, f64),
    trace: Vec<f64>,
}

fn alm(x: &Matrix, a: &Matrix, model: ErrorModel, opts: &SolverOptions) -> Result<AlmOutput> {
    let (d, n) = x.dim();
    let na = a.ncols();
    let at = a.t();
    let gram = Array2::eye(na) + at.dot(a);
    // I + A^T A is positive definite for any finite A; a failure here is a bug
    // in the factorization backend.
    let inv = spd_inverse(&gram)?;
    let atx = at.dot(x);

    let mut z = Array2::<f64>::zeros((na, n));
    let mut e = Array2::<f64>::zeros((d, n));
    let mut y1 = Array2::<f64>::zeros((d, n));
    let mut y2 = Array2::<f64>::zeros((na, n));
    let mut mu = opts.mu_init;
    let mut trace = Vec::new();
    let mut residuals = (f64::INFINITY, f64::INFINITY);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        iterations += 1;

        let target = &z + &(&y2 / mu);
        let thresholded = linalg::svt_with_stats(&target, 1.0 / mu)?;
        let j = thresholded.matrix;

        let rhs = &atx - &at.dot(&e) + &j + &((&at.dot(&y1) - &y2) / mu);
        z = inv.dot(&rhs);

        let az = a.dot(&z);
        let g = x - &az + &(&y1 / mu);
        e = model.prox(&g, opts.lambda, mu);

        let leq1 = x - &az - &e;
        let leq2 = &z - &j;
        y1.scaled_add(mu, &leq1);
        y2.scaled_add(mu, &leq2);
        mu = (opts.rho * mu).min(opts.mu_max);

        residuals = (max_abs(&leq1), max_abs(&leq2));
        trace.push(thresholded.nuclear + opts.lambda * model.penalty(&e));
        if residuals.0 < opts.eps && residuals.1 < opts.eps {
            converged = true;
            break;
        }
    }
    log::debug!(
        "alm {d}x{n} (n_A = {na}): {iterations} iterations, converged = {converged}, residuals = {residuals:?}"
    );
    Ok(AlmOutput {
        z,
        e,
        iterations,
        converged,
        residuals,
        trace,
    })
}

fn check_inputs<S, T>(x: &ArrayBase<S, Ix2>, a: &ArrayBase<T, Ix2>) -> Result<()>
where
    S: Data<Elem = f64>,
    T: Data<Elem = f64>,
{
    if x.nrows() != a.nrows() {
        return Err(LrrError::DimensionMismatch(format!(
            "data has {} rows but dictionary has {}",
            x.nrows(),
            a.nrows()
        )));
    }
    if x.is_empty() || a.is_empty() {
        return Err(LrrError::InvalidArgument("empty data or dictionary".into()));
    }
    linalg::ensure_finite(x)?;
    linalg::ensure_finite(a)
}

fn finish(out: AlmOutput, z: Matrix, model: ErrorModel, lambda: f64, reduced: bool) -> Result<LrrSolution> {
    let objective = nuclear_norm(&z)? + lambda * model.penalty(&out.e);
    Ok(LrrSolution {
        z,
        e: out.e,
        iterations: out.iterations,
        converged: out.converged,
        final_residuals: out.residuals,
        objective,
        objective_trace: out.trace,
        reduced,
    })
}

/// Solves `min ||Z||_* + lambda ||E||  s.t.  X = A Z + E` by inexact ALM on
/// the dictionary as given.
///
/// Returns the last iterate with `converged = false` when `max_iters` is
/// reached first.
pub fn solve_lrr<S, T>(
    x: &ArrayBase<S, Ix2>,
    a: &ArrayBase<T, Ix2>,
    model: ErrorModel,
    opts: &SolverOptions,
) -> Result<LrrSolution>
where
    S: Data<Elem = f64>,
    T: Data<Elem = f64>,
{
    opts.validate()?;
    check_inputs(x, a)?;
    let out = alm(&x.to_owned(), &a.to_owned(), model, opts)?;
    let z = out.z.clone();
    finish(out, z, model, opts.lambda, false)
}

/// Same problem as [`solve_lrr`], solved over `B = A P` and lifted back with
/// `Z = P Z~`.
pub fn solve_lrr_reduced<S, T>(
    x: &ArrayBase<S, Ix2>,
    a: &ArrayBase<T, Ix2>,
    model: ErrorModel,
    opts: &SolverOptions,
) -> Result<LrrSolution>
where
    S: Data<Elem = f64>,
    T: Data<Elem = f64>,
{
    opts.validate()?;
    check_inputs(x, a)?;
    let reduced = reduce_dictionary(a)?;
    solve_on_reduced(&x.to_owned(), &reduced, model, opts)
}

fn solve_on_reduced(
    x: &Matrix,
    reduced: &ReducedDictionary,
    model: ErrorModel,
    opts: &SolverOptions,
) -> Result<LrrSolution> {
    let out = alm(x, &reduced.b, model, opts)?;
    let z = reduced.lift(&out.z);
    finish(out, z, model, opts.lambda, true)
}

/// Self-expressive LRR (`A = X`), switching to the reduced dictionary when
/// `rank(X) < 0.8 min(d, n)`.
pub fn solve_lrr_self<S: Data<Elem = f64>>(
    x: &ArrayBase<S, Ix2>,
    model: ErrorModel,
    opts: &SolverOptions,
) -> Result<LrrSolution> {
    opts.validate()?;
    check_inputs(x, x)?;
    let x = x.to_owned();
    let reduced = match reduce_dictionary(&x) {
        Ok(r) => r,
        Err(LrrError::Degenerate(_)) => {
            return Err(LrrError::Degenerate("data matrix is zero".into()))
        }
        Err(e) => return Err(e),
    };
    let (d, n) = x.dim();
    if (reduced.rank as f64) < REDUCTION_RATIO * d.min(n) as f64 {
        solve_on_reduced(&x, &reduced, model, opts)
    } else {
        let out = alm(&x, &x, model, opts)?;
        let z = out.z.clone();
        finish(out, z, model, opts.lambda, false)
    }
}

/// Closed-form minimizer `Z = A^+ X` of `min ||Z||_*  s.t.  X = A Z`.
///
/// Fails with [`LrrError::Infeasible`] when `||X - A A^+ X||_F` exceeds
/// [`CLEAN_FEASIBILITY_TOL`] times `||X||_F`.
pub fn solve_lrr_clean<S, T>(x: &ArrayBase<S, Ix2>, a: &ArrayBase<T, Ix2>) -> Result<Matrix>
where
    S: Data<Elem = f64>,
    T: Data<Elem = f64>,
{
    check_inputs(x, a)?;
    if max_abs(a) == 0.0 {
        return Err(LrrError::Degenerate("dictionary is the zero matrix".into()));
    }
    let z = pseudoinverse(a)?.dot(x);
    let residual = frobenius_norm(&(x - &a.dot(&z)));
    let scale = frobenius_norm(x);
    if residual > CLEAN_FEASIBILITY_TOL * scale {
        return Err(LrrError::Infeasible {
            residual: residual / scale,
        });
    }
    Ok(z)
}

/// `lambda = 3 / (7 ||X|| sqrt(gamma* n))`, the outlier-fraction-dependent
/// parameter under which exact recovery holds. `gamma_star` must be supplied.
pub fn lambda_outlier_default<S: Data<Elem = f64>>(x: &ArrayBase<S, Ix2>, gamma_star: f64) -> Result<f64> {
    if !(gamma_star > 0.0 && gamma_star <= 1.0) {
        return Err(LrrError::InvalidArgument(format!(
            "gamma_star must lie in (0, 1], got {gamma_star}"
        )));
    }
    let spectral = linalg::spectral_norm(x)?;
    if spectral == 0.0 {
        return Err(LrrError::Degenerate("data matrix is zero".into()));
    }
    Ok(3.0 / (7.0 * spectral * (gamma_star * x.ncols() as f64).sqrt()))
}
