//! Seed-pinned recipes for the synthetic experiments.
//!
//! Each recipe builds its dataset from `synth`, runs the pipeline with the
//! experiment parameters and returns everything needed for metrics and plot
//! tables. Sub-seeds are derived as `seed + offset`.

use std::time::Instant;

use ndarray::Axis;
use serde::{Deserialize, Serialize};

use crate::cluster::{build_affinity, ncut_segment, Affinity};
use crate::error::{LrrError, Result};
use crate::eval::{auc, recovery_error, segmentation_accuracy, AccuracyStrategy, LabeledPrediction, ScoredBinary};
use crate::linalg::{column_norms, frobenius_norm, skinny_svd, Matrix, SOLUTION_RANK_TOL};
use crate::solver::{solve_lrr_clean, solve_lrr_self, ErrorModel, LrrSolution, SolverOptions};
use crate::synth::{
    add_noise, add_outliers, corrupt_samples, gen_ensemble, normalize_columns, sample, SubspaceMode,
    SyntheticDataset,
};

/// Lambda grid on which outlier exactness is checked.
pub const FIG4_LAMBDAS: [f64; 5] = [0.16, 0.20, 0.25, 0.30, 0.34];

/// Largest recovery error still counted as exact recovery.
pub const EXACT_RECOVERY_TOL: f64 = 1e-3;

/// Lambda grid searched for the corruption experiments.
pub const FIG5_LAMBDAS: [f64; 10] = [0.05, 0.08, 0.1, 0.12, 0.15, 0.2, 0.25, 0.3, 0.4, 0.6];

/// Corruption magnitudes of the two corruption experiments.
pub const FIG5_SCALES: [f64; 2] = [0.7, 3.5];

/// `|[U U^T]_ij|` above this counts as an edge for the affinity degree.
pub const DEGREE_TOL: f64 = 1e-3;

/// Target `||E0||_F / ||X0||_F` for the mixed-error experiment.
pub const FIG6_ERROR_RATIO: f64 = 0.63;

/// Lambda of the mixed-error experiment.
pub const FIG6_LAMBDA: f64 = 0.3;

const FIG6_CORRUPTION_SCALE: f64 = 1.0;
const CALIBRATION_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig6,
}

impl std::str::FromStr for Figure {
    type Err = LrrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            "fig5a" => Ok(Figure::Fig5a),
            "fig5b" => Ok(Figure::Fig5b),
            "fig6" => Ok(Figure::Fig6),
            other => Err(LrrError::InvalidArgument(format!(
                "unknown figure `{other}` (expected fig3, fig4, fig5a, fig5b or fig6)"
            ))),
        }
    }
}

impl std::fmt::Display for Figure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
            Figure::Fig6 => "fig6",
        };
        f.write_str(s)
    }
}

/// Largest `E*` column norm off `planted` and smallest on it.
pub fn norm_separation(e: &Matrix, planted: &[usize]) -> (f64, f64) {
    let norms = column_norms(e);
    let mut max_rest = 0.0f64;
    let mut min_planted = f64::INFINITY;
    for (i, &n) in norms.iter().enumerate() {
        if planted.binary_search(&i).is_ok() {
            min_planted = min_planted.min(n);
        } else {
            max_rest = max_rest.max(n);
        }
    }
    (max_rest, min_planted)
}

/// Outlier scores (column norms of `E*`) against membership in `planted`.
pub fn planted_auc(e: &Matrix, planted: &[usize]) -> Result<f64> {
    let scores = column_norms(e).to_vec();
    let truth = (0..scores.len()).map(|i| planted.binary_search(&i).is_ok()).collect();
    auc(&ScoredBinary::new(scores, truth)?)
}

/// Accuracy over the authentic columns, by the automatic strategy.
pub fn authentic_accuracy(ds: &SyntheticDataset, labels: &[usize], k: usize) -> Result<f64> {
    let idx = ds.authentic_indices();
    let predicted = idx.iter().map(|&i| labels[i]).collect();
    let truth = idx.iter().map(|&i| ds.true_labels[i] as usize).collect();
    let p = LabeledPrediction::new(predicted, truth, k, ds.k)?;
    segmentation_accuracy(&p, AccuracyStrategy::Auto)
}

/// Mean number of other samples connected to each sample of `rows` in
/// `|U U^T|`, with `U` the column basis of `Z*`.
pub fn average_degree(z: &Matrix, rows: &[usize]) -> Result<f64> {
    if rows.is_empty() {
        return Ok(0.0);
    }
    let u = skinny_svd(z, SOLUTION_RANK_TOL)?.u;
    let p = u.dot(&u.t());
    let total: usize = rows
        .iter()
        .map(|&i| (0..p.ncols()).filter(|&j| j != i && p[[i, j]].abs() > DEGREE_TOL).count())
        .sum();
    Ok(total as f64 / rows.len() as f64)
}

/// Lambda of the end-to-end segmentation of the clean dependent subspaces.
pub const FIG3_LAMBDA: f64 = 0.25;

pub struct Fig3Report {
    pub dataset: SyntheticDataset,
    /// LRR pipeline at [`FIG3_LAMBDA`].
    pub solution: LrrSolution,
    pub affinity: Affinity,
    pub labels: Vec<usize>,
    /// Automatic strategy (local majority, since k >= 10).
    pub accuracy: f64,
    pub accuracy_global: f64,
    /// `V0 V0^T`, the clean-data minimizer.
    pub shape_interaction: Matrix,
    /// Accuracy of spectral clustering on the affinity of `V0 V0^T` alone.
    pub shape_interaction_accuracy: f64,
}

/// 11 disjoint 20-dimensional subspaces of `R^200`, 20 clean samples each.
pub fn fig3_data(seed: u64) -> Result<SyntheticDataset> {
    let ens = gen_ensemble(11, 20, 200, SubspaceMode::Disjoint, seed)?;
    sample(&ens, 20, seed.wrapping_add(1))
}

/// Segmentation of dependent subspaces, both end to end and from the
/// clean-data minimizer `V0 V0^T = X^+ X`.
pub fn fig3(seed: u64) -> Result<Fig3Report> {
    let dataset = fig3_data(seed)?;
    let k = dataset.k;
    let solution = solve_lrr_self(&dataset.x, ErrorModel::L21, &SolverOptions::new(FIG3_LAMBDA))?;
    let affinity = build_affinity(&solution.z)?;
    let labels = ncut_segment(&affinity, k, seed)?;
    let accuracy = authentic_accuracy(&dataset, &labels, k)?;
    let truth = dataset.true_labels.iter().map(|&l| l as usize).collect();
    let p = LabeledPrediction::new(labels.clone(), truth, k, k)?;
    let accuracy_global = segmentation_accuracy(&p, AccuracyStrategy::Global)?;

    let shape_interaction = solve_lrr_clean(&dataset.x, &dataset.x)?;
    let clean_labels = ncut_segment(&build_affinity(&shape_interaction)?, k, seed)?;
    let shape_interaction_accuracy = authentic_accuracy(&dataset, &clean_labels, k)?;
    Ok(Fig3Report {
        dataset,
        solution,
        affinity,
        labels,
        accuracy,
        accuracy_global,
        shape_interaction,
        shape_interaction_accuracy,
    })
}

/// One solve of the outlier experiment.
pub struct LambdaRun {
    pub lambda: f64,
    pub solution: LrrSolution,
    pub recovery_error: f64,
    pub rank: usize,
    pub max_clean_norm: f64,
    pub min_planted_norm: f64,
    /// Detected set at a threshold halfway between the two norms above.
    pub detected: Vec<usize>,
    pub detected_exact: bool,
    pub exact: bool,
    pub auc: f64,
    pub accuracy: f64,
    pub seconds: f64,
}

/// Solves self-expressive l2,1 LRR at `lambda` and scores it against the
/// planted set (outliers and corrupted columns).
pub fn run_lambda(ds: &SyntheticDataset, lambda: f64) -> Result<LambdaRun> {
    let start = Instant::now();
    let solution = solve_lrr_self(&ds.x, ErrorModel::L21, &SolverOptions::new(lambda))?;
    let seconds = start.elapsed().as_secs_f64();
    let mut planted: Vec<usize> = ds.outlier_indices.iter().chain(&ds.corrupted_indices).copied().collect();
    planted.sort_unstable();
    let recovery_error = recovery_error(&solution.z, &ds.v0)?;
    let rank = skinny_svd(&solution.z, SOLUTION_RANK_TOL)?.rank();
    let (max_clean_norm, min_planted_norm) = norm_separation(&solution.e, &planted);
    let delta = (0.5 * (max_clean_norm + min_planted_norm)).max(f64::MIN_POSITIVE);
    let detected = crate::cluster::detect_outliers(&solution.e, delta)?;
    let detected_exact = detected == planted;
    let affinity = build_affinity(&solution.z)?;
    let labels = ncut_segment(&affinity, ds.k, 0)?;
    Ok(LambdaRun {
        lambda,
        recovery_error,
        rank,
        max_clean_norm,
        min_planted_norm,
        exact: recovery_error <= EXACT_RECOVERY_TOL && detected_exact,
        detected,
        detected_exact,
        auc: planted_auc(&solution.e, &planted)?,
        accuracy: authentic_accuracy(ds, &labels, ds.k)?,
        solution,
        seconds,
    })
}

pub struct Fig4Report {
    pub dataset: SyntheticDataset,
    pub runs: Vec<LambdaRun>,
}

impl Fig4Report {
    pub fn all_exact(&self) -> bool {
        self.runs.iter().all(|r| r.exact)
    }
}

/// 5 disjoint 4-dimensional subspaces of `R^200`, 40 samples each, plus 50
/// Gaussian outliers three times as long as a sample; all columns are then
/// scaled to unit length.
pub fn fig4_data(seed: u64) -> Result<SyntheticDataset> {
    let ens = gen_ensemble(5, 4, 200, SubspaceMode::Disjoint, seed)?;
    let ds = sample(&ens, 40, seed.wrapping_add(1))?;
    let ds = add_outliers(&ds, 50, 3.0, seed.wrapping_add(2))?;
    normalize_columns(&ds)
}

pub fn fig4(seed: u64) -> Result<Fig4Report> {
    fig4_with(seed, &FIG4_LAMBDAS)
}

pub fn fig4_with(seed: u64, lambdas: &[f64]) -> Result<Fig4Report> {
    let dataset = fig4_data(seed)?;
    let runs = lambdas
        .iter()
        .map(|&l| run_lambda(&dataset, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(Fig4Report { dataset, runs })
}

pub struct Fig5Report {
    pub dataset: SyntheticDataset,
    pub scale: f64,
    /// `(lambda, corrupted columns separable by norm)` over the grid.
    pub sweep: Vec<(f64, bool)>,
    pub chosen: LambdaRun,
    /// Mean affinity degree of the corrupted samples at the chosen lambda.
    pub corrupted_degree: f64,
}

/// The `fig4` subspaces and samples with 10% of the samples corrupted at
/// `scale` times their norm, columns scaled to unit length.
pub fn fig5_data(seed: u64, scale: f64) -> Result<SyntheticDataset> {
    let ens = gen_ensemble(5, 4, 200, SubspaceMode::Disjoint, seed)?;
    let ds = sample(&ens, 40, seed.wrapping_add(1))?;
    let ds = corrupt_samples(&ds, 0.1, scale, seed.wrapping_add(2))?;
    normalize_columns(&ds)
}

/// Sweeps [`FIG5_LAMBDAS`] and keeps the middle of the lambdas at which the
/// corrupted columns of `E*` are separable by norm.
pub fn fig5(seed: u64, scale: f64) -> Result<Fig5Report> {
    let dataset = fig5_data(seed, scale)?;
    let mut sweep = Vec::new();
    let mut good = Vec::new();
    for &lambda in &FIG5_LAMBDAS {
        let run = run_lambda(&dataset, lambda)?;
        let separable = run.max_clean_norm < run.min_planted_norm;
        sweep.push((lambda, separable));
        if separable {
            good.push(run);
        }
    }
    if good.is_empty() {
        return Err(LrrError::Degenerate(
            "no lambda on the grid separates the corrupted columns".into(),
        ));
    }
    let chosen = good.swap_remove(good.len() / 2);
    let corrupted_degree = average_degree(&chosen.solution.z, &dataset.corrupted_indices)?;
    Ok(Fig5Report {
        dataset,
        scale,
        sweep,
        chosen,
        corrupted_degree,
    })
}

pub struct Fig6Report {
    pub dataset: SyntheticDataset,
    pub noise_level: f64,
    pub run: LambdaRun,
}

/// `||E0||_F / ||X0||_F` after scaling columns of `X` to unit length,
/// without recomputing `V0`.
fn unit_column_error_ratio(ds: &SyntheticDataset) -> f64 {
    let norms = column_norms(&ds.x);
    let scale = |m: &Matrix| {
        let mut m = m.clone();
        for (mut col, &n) in m.axis_iter_mut(Axis(1)).zip(norms.iter()) {
            if n > 0.0 {
                col.mapv_inplace(|v| v / n);
            }
        }
        frobenius_norm(&m)
    };
    scale(&ds.e0) / scale(&ds.x0)
}

/// 10 disjoint 4-dimensional subspaces of `R^2000`, 40 samples each; 10% of
/// samples grossly corrupted, the rest lightly noised, 100 outliers as in
/// `fig4`, columns scaled to unit length. The noise level is found by
/// bisection so that the error ratio is [`FIG6_ERROR_RATIO`].
pub fn fig6_data(seed: u64) -> Result<(SyntheticDataset, f64)> {
    let ens = gen_ensemble(10, 4, 2000, SubspaceMode::Disjoint, seed)?;
    let base = sample(&ens, 40, seed.wrapping_add(1))?;
    let base = corrupt_samples(&base, 0.1, FIG6_CORRUPTION_SCALE, seed.wrapping_add(2))?;
    let build = |level: f64| -> Result<SyntheticDataset> {
        let ds = add_noise(&base, level, seed.wrapping_add(3))?;
        add_outliers(&ds, 100, 3.0, seed.wrapping_add(4))
    };
    let (mut lo, mut hi) = (0.0, 2.0);
    if unit_column_error_ratio(&build(hi)?) < FIG6_ERROR_RATIO {
        return Err(LrrError::Degenerate("noise calibration bracket too small".into()));
    }
    for _ in 0..CALIBRATION_STEPS {
        let mid = 0.5 * (lo + hi);
        if unit_column_error_ratio(&build(mid)?) < FIG6_ERROR_RATIO {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let level = 0.5 * (lo + hi);
    Ok((normalize_columns(&build(level)?)?, level))
}

pub fn fig6(seed: u64) -> Result<Fig6Report> {
    let (dataset, noise_level) = fig6_data(seed)?;
    let run = run_lambda(&dataset, FIG6_LAMBDA)?;
    Ok(Fig6Report {
        dataset,
        noise_level,
        run,
    })
}
