//! From an LRR solution to decisions: affinity, spectral segmentation,
//! estimation of the number of subspaces and outlier detection.

use ndarray::{Array1, Array2, ArrayBase, Axis, Data, Ix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LrrError, Result};
use crate::linalg::{self, column_norms, ensure_finite, skinny_svd, Matrix, SOLUTION_RANK_TOL};
use crate::solver::{solve_lrr_self, ErrorModel, LrrSolution, SolverOptions};

/// Default soft threshold for [`estimate_k`].
pub const DEFAULT_TAU: f64 = 0.08;

/// Number of k-means restarts in [`ncut_segment`].
pub const KMEANS_RESTARTS: usize = 20;

const KMEANS_MAX_ITERS: usize = 100;

/// Symmetric nonnegative affinity `W_ij = ([U~ U~^T]_ij)^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affinity {
    pub w: Matrix,
    /// Set when `Z*` had no singular value above tolerance and `W = 0`.
    pub degenerate: bool,
}

impl Affinity {
    /// Wraps a user-supplied matrix after checking symmetry and signs.
    pub fn from_matrix(w: Matrix) -> Result<Self> {
        ensure_finite(&w)?;
        let n = w.nrows();
        if w.ncols() != n {
            return Err(LrrError::DimensionMismatch(format!("affinity must be square, got {:?}", w.dim())));
        }
        for i in 0..n {
            for j in 0..n {
                if w[[i, j]] < 0.0 || w[[i, j]] != w[[j, i]] {
                    return Err(LrrError::InvalidArgument(
                        "affinity must be symmetric with nonnegative entries".into(),
                    ));
                }
            }
        }
        let degenerate = w.iter().all(|&v| v == 0.0);
        Ok(Affinity { w, degenerate })
    }

    pub fn len(&self) -> usize {
        self.w.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Row sums of `W`.
    pub fn degrees(&self) -> Array1<f64> {
        self.w.sum_axis(Axis(1))
    }
}

/// Singular values of the normalized Laplacian, non-decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplacianSpectrum {
    pub sigma: Vec<f64>,
}

/// Whether the number of clusters is given or estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterCount {
    Fixed(usize),
    Auto,
}

impl std::str::FromStr for ClusterCount {
    type Err = LrrError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(ClusterCount::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(ClusterCount::Fixed(k)),
            _ => Err(LrrError::InvalidArgument(format!(
                "cluster count must be a positive integer or `auto`, got `{s}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentOptions {
    pub k: ClusterCount,
    pub model: ErrorModel,
    pub solver: SolverOptions,
    pub tau: f64,
    /// Outlier threshold on column norms of `E*`; no detection when `None`.
    pub delta: Option<f64>,
    /// Seed for k-means.
    pub seed: u64,
}

impl SegmentOptions {
    pub fn new(k: ClusterCount, lambda: f64) -> Self {
        SegmentOptions {
            k,
            model: ErrorModel::L21,
            solver: SolverOptions::new(lambda),
            tau: DEFAULT_TAU,
            delta: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationResult {
    /// Cluster id per column, in `0..k`.
    pub labels: Vec<usize>,
    pub k: usize,
    /// Sorted indices of detected outliers.
    pub outliers: Vec<usize>,
    /// Estimated number of subspaces, when requested.
    pub k_hat: Option<usize>,
    pub solution: LrrSolution,
    pub affinity: Affinity,
    pub spectrum: Option<LaplacianSpectrum>,
}

/// Affinity from `Z*` at [`SOLUTION_RANK_TOL`].
pub fn build_affinity<S: Data<Elem = f64>>(z: &ArrayBase<S, Ix2>) -> Result<Affinity> {
    build_affinity_with_tol(z, SOLUTION_RANK_TOL)
}

/// Affinity from the skinny SVD `Z* = U S V^T` truncated at a relative
/// tolerance: `U~ = U S^{1/2}` with unit rows, `W = (U~ U~^T).^2`.
pub fn build_affinity_with_tol<S: Data<Elem = f64>>(z: &ArrayBase<S, Ix2>, rank_tol: f64) -> Result<Affinity> {
    let svd = skinny_svd(z, rank_tol)?;
    let n = z.nrows();
    if svd.rank() == 0 {
        return Ok(Affinity {
            w: Array2::zeros((n, n)),
            degenerate: true,
        });
    }
    let mut u = svd.u;
    linalg::scale_columns(&mut u, svd.sigma.iter().map(|s| s.sqrt()));
    normalize_rows(&mut u);
    let g = u.dot(&u.t());
    let mut w = g.mapv(|v| v * v);
    // exact symmetry regardless of rounding in the product
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (w[[i, j]] + w[[j, i]]);
            w[[i, j]] = v;
            w[[j, i]] = v;
        }
    }
    Ok(Affinity { w, degenerate: false })
}

fn normalize_rows(m: &mut Matrix) {
    for mut row in m.rows_mut() {
        let norm = row.dot(&row).sqrt();
        if norm > 0.0 {
            row.mapv_inplace(|v| v / norm);
        }
    }
}

/// `D^{-1/2}` with zero for isolated nodes.
fn inv_sqrt_degrees(w: &Affinity) -> Array1<f64> {
    w.degrees().mapv(|d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
}

/// `L = I - D^{-1/2} W D^{-1/2}`.
pub fn normalized_laplacian(w: &Affinity) -> Matrix {
    let s = inv_sqrt_degrees(w);
    let n = w.len();
    Array2::from_shape_fn((n, n), |(i, j)| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - s[i] * w.w[[i, j]] * s[j]
    })
}

/// Singular values of the normalized Laplacian. `L` is symmetric positive
/// semidefinite, so these are the absolute eigenvalues.
pub fn laplacian_spectrum(w: &Affinity) -> Result<LaplacianSpectrum> {
    if w.is_empty() {
        return Ok(LaplacianSpectrum { sigma: Vec::new() });
    }
    let (values, _) = linalg::symmetric_eigen(&normalized_laplacian(w))?;
    let mut sigma: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    sigma.sort_by(f64::total_cmp);
    Ok(LaplacianSpectrum { sigma })
}

/// Soft-thresholded count `k = n - round(sum f(sigma_i))` with
/// `f(s) = 1` for `s >= tau` and `log2(1 + s^2 / tau^2)` below. Ties round
/// away from zero; the result is at least 1.
pub fn estimate_k(spectrum: &LaplacianSpectrum, tau: f64) -> Result<usize> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(LrrError::InvalidArgument(format!("tau must lie in (0, 1), got {tau}")));
    }
    let soft: f64 = spectrum
        .sigma
        .iter()
        .map(|&s| if s >= tau { 1.0 } else { (1.0 + s * s / (tau * tau)).log2() })
        .sum();
    let n = spectrum.sigma.len() as f64;
    Ok((n - soft.round()).max(1.0) as usize)
}

/// Normalized spectral clustering into `k` groups.
///
/// Self-loops are dropped first. Each node is embedded with the `k`
/// eigenvectors of the normalized Laplacian of smallest eigenvalue, rows are
/// normalized and seeded k-means assigns the labels. Nodes of zero degree
/// are set aside: the rest are split into `k - 1` groups and the isolated
/// nodes share the last label.
pub fn ncut_segment(w: &Affinity, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = w.len();
    if k == 0 || k > n {
        return Err(LrrError::InvalidArgument(format!("need 1 <= k <= n = {n}, got k = {k}")));
    }
    if k == 1 {
        return Ok(vec![0; n]);
    }
    let mut graph = w.w.clone();
    graph.diag_mut().fill(0.0);
    let w = &Affinity {
        w: graph,
        degenerate: w.degenerate,
    };
    let degrees = w.degrees();
    let connected: Vec<usize> = (0..n).filter(|&i| degrees[i] > 0.0).collect();
    if connected.len() == n {
        return spectral_kmeans(w, k, seed);
    }
    let mut labels = vec![k - 1; n];
    if !connected.is_empty() {
        let sub = Affinity {
            w: w.w.select(Axis(0), &connected).select(Axis(1), &connected),
            degenerate: false,
        };
        let groups = (k - 1).min(connected.len());
        let inner = if groups == 1 {
            vec![0; connected.len()]
        } else {
            spectral_kmeans(&sub, groups, seed)?
        };
        for (&i, l) in connected.iter().zip(inner) {
            labels[i] = l;
        }
    }
    Ok(labels)
}

fn spectral_kmeans(w: &Affinity, k: usize, seed: u64) -> Result<Vec<usize>> {
    let (_, vectors) = linalg::symmetric_eigen(&normalized_laplacian(w))?;
    let mut embedding = vectors.slice(ndarray::s![.., ..k]).to_owned();
    normalize_rows(&mut embedding);
    Ok(kmeans(&embedding, k, KMEANS_RESTARTS, seed))
}

/// Lloyd's k-means on the rows of `points` with farthest-point seeding from
/// a random first center. The run with the smallest within-cluster sum of
/// squares wins; labels are renumbered in order of first appearance.
pub fn kmeans(points: &Matrix, k: usize, restarts: usize, seed: u64) -> Vec<usize> {
    let n = points.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..restarts.max(1) {
        let first = rng.random_range(0..n);
        let (sse, labels) = lloyd(points, farthest_point_init(points, k, first));
        if best.as_ref().is_none_or(|(b, _)| sse < *b) {
            best = Some((sse, labels));
        }
    }
    canonical_labels(&best.expect("at least one restart").1)
}

fn sq_dist(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn farthest_point_init(points: &Matrix, k: usize, first: usize) -> Matrix {
    let n = points.nrows();
    let mut chosen = vec![first];
    let mut nearest: Vec<f64> = (0..n).map(|i| sq_dist(points.row(i), points.row(first))).collect();
    while chosen.len() < k {
        let next = (0..n)
            .max_by(|&a, &b| nearest[a].total_cmp(&nearest[b]).then(b.cmp(&a)))
            .expect("nonempty");
        chosen.push(next);
        for i in 0..n {
            nearest[i] = nearest[i].min(sq_dist(points.row(i), points.row(next)));
        }
    }
    points.select(Axis(0), &chosen)
}

fn lloyd(points: &Matrix, mut centers: Matrix) -> (f64, Vec<usize>) {
    let (n, dim) = points.dim();
    let k = centers.nrows();
    let mut labels = vec![usize::MAX; n];
    for _ in 0..KMEANS_MAX_ITERS {
        let mut changed = false;
        for i in 0..n {
            let l = nearest_center(points.row(i), &centers).0;
            if labels[i] != l {
                labels[i] = l;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = Array2::<f64>::zeros((k, dim));
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let mut row = sums.row_mut(labels[i]);
            row += &points.row(i);
            counts[labels[i]] += 1;
        }
        for c in 0..k {
            // an emptied cluster keeps its previous center
            if counts[c] > 0 {
                let mean = &sums.row(c) / counts[c] as f64;
                centers.row_mut(c).assign(&mean);
            }
        }
    }
    let sse = (0..n).map(|i| nearest_center(points.row(i), &centers).1).sum();
    (sse, labels)
}

fn nearest_center(p: ndarray::ArrayView1<f64>, centers: &Matrix) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.rows().into_iter().enumerate() {
        let d = sq_dist(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Columns of `E*` whose norm exceeds `delta`, sorted.
pub fn detect_outliers<S: Data<Elem = f64>>(e: &ArrayBase<S, Ix2>, delta: f64) -> Result<Vec<usize>> {
    if !(delta > 0.0) {
        return Err(LrrError::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    Ok(column_norms(e)
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > delta)
        .map(|(i, _)| i)
        .collect())
}

/// Self-expressive LRR followed by affinity, optional estimation of `k`,
/// spectral clustering and optional outlier detection.
pub fn segment<S: Data<Elem = f64>>(x: &ArrayBase<S, Ix2>, opts: &SegmentOptions) -> Result<SegmentationResult> {
    if let Some(delta) = opts.delta {
        if !(delta > 0.0) {
            return Err(LrrError::InvalidArgument(format!("delta must be positive, got {delta}")));
        }
    }
    let solution = solve_lrr_self(x, opts.model, &opts.solver)?;
    let affinity = build_affinity(&solution.z)?;
    let n = affinity.len();
    let (k, k_hat, spectrum) = match opts.k {
        ClusterCount::Fixed(k) => (k, None, None),
        ClusterCount::Auto => {
            let spectrum = laplacian_spectrum(&affinity)?;
            let k_hat = estimate_k(&spectrum, opts.tau)?.min(n);
            (k_hat, Some(k_hat), Some(spectrum))
        }
    };
    let labels = ncut_segment(&affinity, k, opts.seed)?;
    let outliers = match opts.delta {
        Some(delta) => detect_outliers(&solution.e, delta)?,
        None => Vec::new(),
    };
    Ok(SegmentationResult {
        labels,
        k,
        outliers,
        k_hat,
        solution,
        affinity,
        spectrum,
    })
}
