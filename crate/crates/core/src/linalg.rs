//! Dense matrix primitives: skinny SVD, pseudoinverse, matrix norms and the
//! proximal operators used by the inexact ALM iterations.
//!
//! Matrices are plain [`ndarray::Array2<f64>`]; every public entry point that
//! factorizes its argument rejects non-finite input first. Singular vectors
//! follow a fixed sign convention (the first nonzero entry of each left
//! singular vector is positive) so that repeated runs yield identical factors.

use ndarray::{s, Array1, Array2, ArrayBase, ArrayView2, Axis, Data, Ix2};

use crate::error::{LrrError, Result};

/// Real dense matrix; columns are samples throughout the crate.
pub type Matrix = Array2<f64>;

/// Entries below this magnitude are treated as zero when fixing the sign of
/// a singular vector.
const SIGN_EPS: f64 = 1e-12;

/// Returns an error naming the first NaN or infinite entry.
pub fn ensure_finite<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<()> {
    for ((row, col), v) in m.indexed_iter() {
        if !v.is_finite() {
            return Err(LrrError::NonFinite { row, col });
        }
    }
    Ok(())
}

fn ensure_nonempty<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(LrrError::InvalidArgument(format!(
            "matrix must have positive dimensions, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

/// Skinny SVD `M = U diag(sigma) V^T` keeping only the singular values above
/// the rank tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SkinnySvd {
    /// `d x r`, orthonormal columns.
    pub u: Matrix,
    /// Strictly positive, non-increasing.
    pub sigma: Array1<f64>,
    /// `n x r`, orthonormal columns.
    pub v: Matrix,
}

impl SkinnySvd {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U diag(sigma) V^T`.
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        scale_columns(&mut us, self.sigma.iter().copied());
        us.dot(&self.v.t())
    }

    /// `V V^T`, the orthogonal projector onto the row space.
    pub fn row_projector(&self) -> Matrix {
        self.v.dot(&self.v.t())
    }

    /// `U U^T`, the orthogonal projector onto the column space.
    pub fn column_projector(&self) -> Matrix {
        self.u.dot(&self.u.t())
    }
}

/// Relative rank tolerance for matrices returned by an iterative solver,
/// whose trailing singular values sit at the convergence threshold rather
/// than at machine precision.
pub const SOLUTION_RANK_TOL: f64 = 1e-6;

/// Default relative rank tolerance `max(d, n) * eps` for a `d x n` operand.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON
}

fn to_faer<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> Matrix {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

fn factors(
    u: faer::MatRef<'_, f64>,
    sigma: impl Iterator<Item = f64>,
    v: faer::MatRef<'_, f64>,
) -> (Matrix, Array1<f64>, Matrix) {
    (from_faer(u), sigma.collect(), from_faer(v))
}

fn all_finite(ms: &[&Matrix]) -> bool {
    ms.iter().all(|m| m.iter().all(|x| x.is_finite()))
}

/// Thin SVD with finite factors, or an error. faer's divide-and-conquer
/// occasionally returns NaN singular vectors for finite rank-deficient
/// inputs; the transpose and then nalgebra's QR-iteration SVD are tried
/// before giving up.
fn robust_thin_svd<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<(Matrix, Array1<f64>, Matrix)> {
    let fm = to_faer(m);
    let ok = |(u, s, v): &(Matrix, Array1<f64>, Matrix)| all_finite(&[u, v]) && s.iter().all(|x| x.is_finite());
    if let Ok(svd) = fm.thin_svd() {
        let out = factors(svd.U(), svd.S().column_vector().iter().copied(), svd.V());
        if ok(&out) {
            return Ok(out);
        }
    }
    if let Ok(svd) = fm.transpose().to_owned().thin_svd() {
        let (v, sigma, u) = factors(svd.U(), svd.S().column_vector().iter().copied(), svd.V());
        let out = (u, sigma, v);
        if ok(&out) {
            log::debug!("faer thin SVD of {:?} was not finite; used the transpose", m.dim());
            return Ok(out);
        }
    }
    log::debug!("faer thin SVD of {:?} was not finite; falling back to nalgebra", m.dim());
    let out = nalgebra_thin_svd(m);
    if ok(&out) {
        Ok(out)
    } else {
        Err(LrrError::numerical(m.dim(), "SVD produced non-finite factors"))
    }
}

fn nalgebra_thin_svd<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> (Matrix, Array1<f64>, Matrix) {
    let (d, n) = m.dim();
    let svd = nalgebra::DMatrix::from_fn(d, n, |i, j| m[[i, j]]).svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let k = order.len();
    (
        Array2::from_shape_fn((d, k), |(i, j)| u[(i, order[j])]),
        order.iter().map(|&j| svd.singular_values[j]).collect(),
        Array2::from_shape_fn((n, k), |(i, j)| vt[(order[j], i)]),
    )
}

/// Full thin SVD with deterministic signs: `(U, sigma, V)` with
/// `min(d, n)` columns, singular values non-increasing (zeros included).
fn thin_svd<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<(Matrix, Array1<f64>, Matrix)> {
    let (mut u, sigma, mut v) = robust_thin_svd(m)?;
    for j in 0..sigma.len() {
        let flip = u
            .column(j)
            .iter()
            .find(|x| x.abs() > SIGN_EPS)
            .is_some_and(|&x| x < 0.0);
        if flip {
            u.column_mut(j).mapv_inplace(|x| -x);
            v.column_mut(j).mapv_inplace(|x| -x);
        }
    }
    Ok((u, sigma, v))
}

/// All `min(d, n)` singular values in non-increasing order.
pub fn singular_values<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<Array1<f64>> {
    ensure_nonempty(m)?;
    ensure_finite(m)?;
    to_faer(m)
        .singular_values()
        .map(Array1::from)
        .map_err(|e| LrrError::numerical(m.dim(), format!("{e:?}")))
}

/// Eigen-decomposition of a symmetric matrix: eigenvalues in non-decreasing
/// order and the matching orthonormal eigenvectors as columns. Only the lower
/// triangle is read.
pub fn symmetric_eigen(m: &Matrix) -> Result<(Array1<f64>, Matrix)> {
    ensure_finite(m)?;
    let evd = to_faer(m)
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| LrrError::numerical(m.dim(), format!("{e:?}")))?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, from_faer(evd.U())))
}

/// Skinny SVD dropping every singular value `<= rank_tol * sigma_max`.
///
/// `rank_tol` is relative to the largest singular value; pass
/// [`default_rank_tol`] for the usual numerical-rank convention. A zero
/// matrix yields rank 0 and empty factors.
pub fn skinny_svd<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>, rank_tol: f64) -> Result<SkinnySvd> {
    ensure_nonempty(m)?;
    ensure_finite(m)?;
    if !(rank_tol >= 0.0) {
        return Err(LrrError::InvalidArgument(format!(
            "rank_tol must be nonnegative, got {rank_tol}"
        )));
    }
    let (u, sigma, v) = thin_svd(m)?;
    let cutoff = rank_tol * sigma.first().copied().unwrap_or(0.0);
    let r = sigma.iter().take_while(|&&s| s > 0.0 && s > cutoff).count();
    Ok(SkinnySvd {
        u: u.slice(s![.., ..r]).to_owned(),
        sigma: sigma.slice(s![..r]).to_owned(),
        v: v.slice(s![.., ..r]).to_owned(),
    })
}

/// Skinny SVD at the default rank tolerance.
pub fn skinny_svd_default<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<SkinnySvd> {
    skinny_svd(m, default_rank_tol(m.nrows(), m.ncols()))
}

/// Numerical rank at a relative tolerance.
pub fn rank<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>, rank_tol: f64) -> Result<usize> {
    let sigma = singular_values(m)?;
    let cutoff = rank_tol * sigma.first().copied().unwrap_or(0.0);
    Ok(sigma.iter().filter(|&&s| s > 0.0 && s > cutoff).count())
}

/// Moore-Penrose pseudoinverse `V diag(1/sigma) U^T`.
pub fn pseudoinverse<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<Matrix> {
    let svd = skinny_svd_default(m)?;
    let mut v = svd.v;
    scale_columns(&mut v, svd.sigma.iter().map(|s| 1.0 / s));
    Ok(v.dot(&svd.u.t()))
}

/// Matrix norms used by the LRR objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixNorm {
    /// Sum of absolute entries.
    L1,
    /// Sum of column Euclidean norms.
    L21,
    Frobenius,
    /// Sum of singular values.
    Nuclear,
    /// Largest singular value.
    Spectral,
    /// Largest absolute entry.
    Linf,
}

impl MatrixNorm {
    pub const ALL: [MatrixNorm; 6] = [
        MatrixNorm::L1,
        MatrixNorm::L21,
        MatrixNorm::Frobenius,
        MatrixNorm::Nuclear,
        MatrixNorm::Spectral,
        MatrixNorm::Linf,
    ];
}

pub fn norm<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>, kind: MatrixNorm) -> Result<f64> {
    Ok(match kind {
        MatrixNorm::L1 => m.iter().map(|x| x.abs()).sum(),
        MatrixNorm::L21 => l21_norm(m),
        MatrixNorm::Frobenius => frobenius_norm(m),
        MatrixNorm::Linf => max_abs(m),
        MatrixNorm::Nuclear | MatrixNorm::Spectral => {
            if m.is_empty() {
                return Ok(0.0);
            }
            let sigma = singular_values(m)?;
            if kind == MatrixNorm::Nuclear {
                sigma.sum()
            } else {
                sigma.first().copied().unwrap_or(0.0)
            }
        }
    })
}

pub fn frobenius_norm<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> f64 {
    m.iter().fold(0.0, |acc: f64, x| acc.max(x.abs()))
}

pub fn l21_norm<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> f64 {
    column_norms(m).sum()
}

pub fn nuclear_norm<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<f64> {
    norm(m, MatrixNorm::Nuclear)
}

pub fn spectral_norm<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Result<f64> {
    norm(m, MatrixNorm::Spectral)
}

/// Euclidean norm of every column.
pub fn column_norms<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>) -> Array1<f64> {
    m.map_axis(Axis(0), |c| c.dot(&c).sqrt())
}

/// Number of entries with magnitude above `tol` (the matrix l0 count).
pub fn l0_count<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>, tol: f64) -> usize {
    m.iter().filter(|x| x.abs() > tol).count()
}

/// Number of columns with Euclidean norm above `tol` (the l2,0 count).
pub fn l20_count<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>, tol: f64) -> usize {
    column_norms(m).iter().filter(|&&n| n > tol).count()
}

/// Result of singular value thresholding with its by-products.
#[derive(Debug, Clone)]
pub(crate) struct Thresholded {
    pub matrix: Matrix,
    /// Nuclear norm of `matrix`.
    pub nuclear: f64,
}

pub(crate) fn svt_with_stats(m: &Matrix, theta: f64) -> Result<Thresholded> {
    let (u, sigma, v) = thin_svd(m)?;
    let r = sigma.iter().take_while(|&&s| s > theta).count();
    let shrunk: Vec<f64> = sigma.iter().take(r).map(|s| s - theta).collect();
    let mut ur = u.slice(s![.., ..r]).to_owned();
    scale_columns(&mut ur, shrunk.iter().copied());
    let matrix = ur.dot(&v.slice(s![.., ..r]).t());
    Ok(Thresholded {
        matrix,
        nuclear: shrunk.iter().sum(),
    })
}

/// Singular value thresholding: `U diag(max(sigma - theta, 0)) V^T`, the
/// minimizer of `theta ||J||_* + 1/2 ||J - M||_F^2`.
pub fn svt<S: Data<Elem = f64>>(m: &ArrayBase<S, Ix2>, theta: f64) -> Result<Matrix> {
    check_threshold(theta)?;
    ensure_nonempty(m)?;
    ensure_finite(m)?;
    if theta == 0.0 {
        return Ok(m.to_owned());
    }
    Ok(svt_with_stats(&m.to_owned(), theta)?.matrix)
}

/// Column-wise shrinkage, the minimizer of `alpha ||W||_{2,1} + 1/2 ||W - Q||_F^2`.
///
/// Column `i` becomes `(||q_i|| - alpha) / ||q_i|| * q_i` when `||q_i|| > alpha`
/// and zero otherwise (including zero columns).
pub fn column_shrink<S: Data<Elem = f64>>(q: &ArrayBase<S, Ix2>, alpha: f64) -> Matrix {
    let mut out = q.to_owned();
    for mut col in out.columns_mut() {
        let n = col.dot(&col).sqrt();
        if n > alpha {
            let scale = (n - alpha) / n;
            col.mapv_inplace(|x| x * scale);
        } else {
            col.fill(0.0);
        }
    }
    out
}

/// Entrywise soft threshold `sign(q) max(|q| - alpha, 0)`, the minimizer of
/// `alpha ||W||_1 + 1/2 ||W - Q||_F^2`.
pub fn entry_shrink<S: Data<Elem = f64>>(q: &ArrayBase<S, Ix2>, alpha: f64) -> Matrix {
    q.mapv(|x| soft_threshold(x, alpha))
}

#[inline]
pub(crate) fn soft_threshold(x: f64, alpha: f64) -> f64 {
    if x > alpha {
        x - alpha
    } else if x < -alpha {
        x + alpha
    } else {
        0.0
    }
}

/// Orthogonal projector `V_A V_A^T` onto the row space of `a`.
pub fn row_space_projector<S: Data<Elem = f64>>(a: &ArrayBase<S, Ix2>) -> Result<Matrix> {
    let svd = skinny_svd_default(a)?;
    if svd.rank() == 0 {
        return Err(LrrError::Degenerate(
            "row space projector of a zero matrix".into(),
        ));
    }
    Ok(svd.row_projector())
}

/// Inverse of a symmetric positive definite matrix through its Cholesky factor.
pub(crate) fn spd_inverse(m: &Matrix) -> Result<Matrix> {
    use faer::linalg::solvers::DenseSolveCore;
    let llt = to_faer(m)
        .llt(faer::Side::Lower)
        .map_err(|e| LrrError::numerical(m.dim(), format!("{e:?}")))?;
    Ok(from_faer(llt.inverse().as_ref()))
}

pub(crate) fn scale_columns(m: &mut Matrix, scales: impl IntoIterator<Item = f64>) {
    for (mut col, s) in m.columns_mut().into_iter().zip(scales) {
        col.mapv_inplace(|x| x * s);
    }
}

fn check_threshold(theta: f64) -> Result<()> {
    if theta >= 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(LrrError::InvalidArgument(format!(
            "threshold must be finite and nonnegative, got {theta}"
        )))
    }
}

/// `max_ij |a_ij - b_ij|`.
pub fn max_abs_diff(a: &ArrayView2<f64>, b: &ArrayView2<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc: f64, (x, y)| acc.max((x - y).abs()))
}
