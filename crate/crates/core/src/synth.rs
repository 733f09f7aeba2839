//! Seeded generators for unions of subspaces with planted errors.
//!
//! Every generator is a pure function of its inputs and seed, and every
//! mutation keeps `X = X0 + E0` exact. Outlier columns of `X0` are zero.

use std::collections::BTreeSet;

use ndarray::{concatenate, Array2, Axis};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{LrrError, Result};
use crate::linalg::{self, column_norms, frobenius_norm, skinny_svd_default, Matrix};

/// Label carried by outlier columns.
pub const OUTLIER_LABEL: i64 = -1;

/// Smallest singular value of `[B_i, B_j]` for two subspaces to count as disjoint.
pub const DISJOINT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceMode {
    /// The sum of the subspaces is direct.
    Independent,
    /// Only pairwise intersections are trivial.
    Disjoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceEnsemble {
    /// `ambient x dim` orthonormal bases.
    pub bases: Vec<Matrix>,
    pub mode: SubspaceMode,
    pub seed: u64,
}

impl SubspaceEnsemble {
    pub fn ambient(&self) -> usize {
        self.bases[0].nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    /// Observed data, `X0 + E0`.
    pub x: Matrix,
    pub x0: Matrix,
    pub e0: Matrix,
    /// Subspace index per column, [`OUTLIER_LABEL`] for outliers.
    pub true_labels: Vec<i64>,
    /// Sorted.
    pub outlier_indices: Vec<usize>,
    /// Authentic columns carrying gross additive errors, sorted.
    pub corrupted_indices: Vec<usize>,
    /// Orthonormal basis of the row space of `X0`.
    pub v0: Matrix,
    /// Number of subspaces.
    pub k: usize,
}

impl SyntheticDataset {
    pub fn dim(&self) -> (usize, usize) {
        self.x.dim()
    }

    /// `||E0||_F / ||X0||_F`.
    pub fn error_ratio(&self) -> f64 {
        frobenius_norm(&self.e0) / frobenius_norm(&self.x0)
    }

    /// Fraction of outlier columns.
    pub fn outlier_fraction(&self) -> f64 {
        self.outlier_indices.len() as f64 / self.x.ncols() as f64
    }

    /// `V0 V0^T`.
    pub fn shape_interaction(&self) -> Matrix {
        self.v0.dot(&self.v0.t())
    }

    /// Rank of `X0`.
    pub fn r0(&self) -> usize {
        self.v0.ncols()
    }

    /// Indices of the columns drawn from the subspaces.
    pub fn authentic_indices(&self) -> Vec<usize> {
        (0..self.true_labels.len())
            .filter(|&i| self.true_labels[i] != OUTLIER_LABEL)
            .collect()
    }

    fn is_clean_authentic(&self, i: usize) -> bool {
        self.true_labels[i] != OUTLIER_LABEL && self.corrupted_indices.binary_search(&i).is_err()
    }
}

fn randn(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Array2::from_shape_fn((rows, cols), |_| StandardNormal.sample(rng))
}

/// Smallest principal angle (radians) between the spans of two orthonormal bases.
pub fn min_principal_angle(a: &Matrix, b: &Matrix) -> Result<f64> {
    let cosines = linalg::singular_values(&a.t().dot(b))?;
    let largest = cosines.first().copied().unwrap_or(0.0).min(1.0);
    Ok(largest.acos())
}

/// Draws `k` random `dim`-dimensional subspaces of `R^ambient` by
/// orthonormalizing standard Gaussian matrices.
pub fn gen_ensemble(k: usize, dim: usize, ambient: usize, mode: SubspaceMode, seed: u64) -> Result<SubspaceEnsemble> {
    if k == 0 || dim == 0 || dim > ambient {
        return Err(LrrError::InvalidArgument(format!(
            "need k >= 1 and 1 <= dim <= ambient, got k={k}, dim={dim}, ambient={ambient}"
        )));
    }
    match mode {
        SubspaceMode::Independent if dim * k > ambient => {
            return Err(LrrError::InvalidArgument(format!(
                "{k} independent subspaces of dimension {dim} do not fit in R^{ambient}"
            )))
        }
        SubspaceMode::Disjoint if k > 1 && 2 * dim > ambient => {
            return Err(LrrError::InvalidArgument(format!(
                "two subspaces of dimension {dim} always intersect in R^{ambient}"
            )))
        }
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bases = (0..k)
        .map(|_| skinny_svd_default(&randn(ambient, dim, &mut rng)).map(|svd| svd.u))
        .collect::<Result<Vec<_>>>()?;
    let ens = SubspaceEnsemble { bases, mode, seed };
    verify_ensemble(&ens)?;
    Ok(ens)
}

fn verify_ensemble(ens: &SubspaceEnsemble) -> Result<()> {
    let dims: usize = ens.bases.iter().map(|b| b.ncols()).sum();
    if ens.bases.iter().any(|b| b.ncols() == 0) {
        return Err(LrrError::Degenerate("basis lost rank".into()));
    }
    match ens.mode {
        SubspaceMode::Independent => {
            let views: Vec<_> = ens.bases.iter().map(|b| b.view()).collect();
            let stacked = concatenate(Axis(1), &views).expect("bases share the ambient dimension");
            if linalg::rank(&stacked, 1e-10)? != dims {
                return Err(LrrError::Degenerate("subspaces are not independent".into()));
            }
        }
        SubspaceMode::Disjoint => {
            for i in 0..ens.bases.len() {
                for j in i + 1..ens.bases.len() {
                    let pair = concatenate(Axis(1), &[ens.bases[i].view(), ens.bases[j].view()])
                        .expect("bases share the ambient dimension");
                    let sigma = linalg::singular_values(&pair)?;
                    if sigma.last().copied().unwrap_or(0.0) <= DISJOINT_TOL {
                        return Err(LrrError::Degenerate(format!(
                            "subspaces {i} and {j} intersect"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Draws `per_subspace` samples from every subspace with standard Gaussian
/// coefficients. Columns are grouped by subspace.
pub fn sample(ens: &SubspaceEnsemble, per_subspace: usize, seed: u64) -> Result<SyntheticDataset> {
    if per_subspace == 0 {
        return Err(LrrError::InvalidArgument("per_subspace must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let blocks: Vec<Matrix> = ens
        .bases
        .iter()
        .map(|b| b.dot(&randn(b.ncols(), per_subspace, &mut rng)))
        .collect();
    let views: Vec<_> = blocks.iter().map(|b| b.view()).collect();
    let x0 = concatenate(Axis(1), &views).expect("blocks share the ambient dimension");
    let true_labels = (0..ens.bases.len())
        .flat_map(|i| std::iter::repeat_n(i as i64, per_subspace))
        .collect();
    let v0 = skinny_svd_default(&x0)?.v;
    Ok(SyntheticDataset {
        x: x0.clone(),
        e0: Array2::zeros(x0.dim()),
        x0,
        true_labels,
        outlier_indices: Vec::new(),
        corrupted_indices: Vec::new(),
        v0,
        k: ens.bases.len(),
    })
}

/// Mean Euclidean norm of the authentic columns of `X0`.
fn mean_sample_norm(ds: &SyntheticDataset) -> f64 {
    let norms = column_norms(&ds.x0);
    let idx = ds.authentic_indices();
    idx.iter().map(|&i| norms[i]).sum::<f64>() / idx.len().max(1) as f64
}

/// Appends `count` Gaussian outlier columns.
///
/// Entries have standard deviation `magnitude_scale * m / sqrt(d)` where `m`
/// is the mean norm of the authentic samples, so an outlier column is about
/// `magnitude_scale` times as long as a typical sample.
pub fn add_outliers(ds: &SyntheticDataset, count: usize, magnitude_scale: f64, seed: u64) -> Result<SyntheticDataset> {
    if count == 0 {
        return Ok(ds.clone());
    }
    if !(magnitude_scale >= 0.0 && magnitude_scale.is_finite()) {
        return Err(LrrError::InvalidArgument("magnitude_scale must be nonnegative".into()));
    }
    let (d, n) = ds.dim();
    let std = magnitude_scale * mean_sample_norm(ds) / (d as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, std).map_err(|e| LrrError::InvalidArgument(e.to_string()))?;
    let outliers = Array2::from_shape_fn((d, count), |_| normal.sample(&mut rng));
    let zeros = Array2::<f64>::zeros((d, count));

    let mut out = ds.clone();
    out.x = concatenate(Axis(1), &[ds.x.view(), outliers.view()]).expect("same rows");
    out.x0 = concatenate(Axis(1), &[ds.x0.view(), zeros.view()]).expect("same rows");
    out.e0 = concatenate(Axis(1), &[ds.e0.view(), outliers.view()]).expect("same rows");
    out.true_labels.extend(std::iter::repeat_n(OUTLIER_LABEL, count));
    out.outlier_indices.extend(n..n + count);
    let pad = Array2::<f64>::zeros((count, ds.v0.ncols()));
    out.v0 = concatenate(Axis(0), &[ds.v0.view(), pad.view()]).expect("same cols");
    Ok(out)
}

/// Adds a Gaussian error to `ceil(fraction * n_authentic)` randomly chosen
/// authentic columns, scaled so each error column has norm
/// `magnitude_scale * ||x0_i||`.
pub fn corrupt_samples(ds: &SyntheticDataset, fraction: f64, magnitude_scale: f64, seed: u64) -> Result<SyntheticDataset> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(LrrError::InvalidArgument(format!("fraction must lie in [0, 1], got {fraction}")));
    }
    let candidates: Vec<usize> = (0..ds.x.ncols()).filter(|&i| ds.is_clean_authentic(i)).collect();
    let count = (fraction * ds.authentic_indices().len() as f64).ceil() as usize;
    let count = count.min(candidates.len());
    if count == 0 {
        return Ok(ds.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<usize> = index::sample(&mut rng, candidates.len(), count)
        .into_iter()
        .map(|i| candidates[i])
        .collect();
    chosen.sort_unstable();

    let d = ds.x.nrows();
    let mut out = ds.clone();
    for &i in &chosen {
        let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let dir_norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let target = magnitude_scale * ds.x0.column(i).dot(&ds.x0.column(i)).sqrt();
        let scale = if dir_norm > 0.0 { target / dir_norm } else { 0.0 };
        for (r, v) in dir.into_iter().enumerate() {
            out.e0[[r, i]] += scale * v;
            out.x[[r, i]] += scale * v;
        }
    }
    let merged: BTreeSet<usize> = ds.corrupted_indices.iter().copied().chain(chosen).collect();
    out.corrupted_indices = merged.into_iter().collect();
    Ok(out)
}

/// Adds i.i.d. Gaussian noise to every clean authentic column with standard
/// deviation `level` times the RMS entry of the authentic samples.
pub fn add_noise(ds: &SyntheticDataset, level: f64, seed: u64) -> Result<SyntheticDataset> {
    if !(level >= 0.0 && level.is_finite()) {
        return Err(LrrError::InvalidArgument(format!("noise level must be nonnegative, got {level}")));
    }
    if level == 0.0 {
        return Ok(ds.clone());
    }
    let (d, _) = ds.dim();
    let authentic = ds.authentic_indices();
    let energy: f64 = authentic
        .iter()
        .map(|&i| ds.x0.column(i).dot(&ds.x0.column(i)))
        .sum();
    let rms = (energy / (d * authentic.len().max(1)) as f64).sqrt();
    let normal = Normal::new(0.0, level * rms).map_err(|e| LrrError::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ds.clone();
    for i in (0..ds.x.ncols()).filter(|&i| ds.is_clean_authentic(i)) {
        for r in 0..d {
            let v = normal.sample(&mut rng);
            out.e0[[r, i]] += v;
            out.x[[r, i]] += v;
        }
    }
    Ok(out)
}

/// Applies a seeded random permutation to the columns. Labels, index sets
/// and the rows of `V0` follow the samples.
pub fn shuffle(ds: &SyntheticDataset, seed: u64) -> SyntheticDataset {
    let n = ds.x.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // perm[new] = old
    let perm: Vec<usize> = index::sample(&mut rng, n, n).into_vec();
    let mut inverse = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    let remap = |set: &[usize]| {
        let mut v: Vec<usize> = set.iter().map(|&i| inverse[i]).collect();
        v.sort_unstable();
        v
    };
    SyntheticDataset {
        x: ds.x.select(Axis(1), &perm),
        x0: ds.x0.select(Axis(1), &perm),
        e0: ds.e0.select(Axis(1), &perm),
        true_labels: perm.iter().map(|&i| ds.true_labels[i]).collect(),
        outlier_indices: remap(&ds.outlier_indices),
        corrupted_indices: remap(&ds.corrupted_indices),
        v0: ds.v0.select(Axis(0), &perm),
        k: ds.k,
    }
}

/// Rescales every column so the observed column has unit length.
///
/// The same factor is applied to `X0` and `E0`, so supports are unchanged;
/// `X` is then recomputed as `X0 + E0` and `V0` from the rescaled `X0`.
/// Zero columns are left alone.
pub fn normalize_columns(ds: &SyntheticDataset) -> Result<SyntheticDataset> {
    let norms = column_norms(&ds.x);
    let mut x0 = ds.x0.clone();
    let mut e0 = ds.e0.clone();
    for (j, &n) in norms.iter().enumerate() {
        if n > 0.0 {
            x0.column_mut(j).mapv_inplace(|v| v / n);
            e0.column_mut(j).mapv_inplace(|v| v / n);
        }
    }
    let v0 = skinny_svd_default(&x0)?.v;
    Ok(SyntheticDataset {
        x: &x0 + &e0,
        x0,
        e0,
        v0,
        ..ds.clone()
    })
}

/// Submatrix of the authentic columns of a square `n x n` matrix such as `Z*`.
pub fn authentic_block(ds: &SyntheticDataset, m: &Matrix) -> Matrix {
    let idx = ds.authentic_indices();
    m.select(Axis(0), &idx).select(Axis(1), &idx)
}
