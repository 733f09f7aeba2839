//! Metrics: segmentation accuracy, ROC/AUC for outlier detection, row-space
//! recovery error and the rank-r error level.

use ndarray::{ArrayBase, Data, Ix2};
use serde::{Deserialize, Serialize};

use crate::error::{LrrError, Result};
use crate::linalg::{self, skinny_svd, Matrix, SOLUTION_RANK_TOL};

/// Largest number of classes the exact matching search accepts.
pub const MAX_GLOBAL_CLASSES: usize = 20;

/// Cluster assignments next to ground-truth classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledPrediction {
    pub predicted: Vec<usize>,
    pub truth: Vec<usize>,
    pub k_pred: usize,
    pub k_true: usize,
}

impl LabeledPrediction {
    pub fn new(predicted: Vec<usize>, truth: Vec<usize>, k_pred: usize, k_true: usize) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(LrrError::DimensionMismatch(format!(
                "{} predictions for {} truth labels",
                predicted.len(),
                truth.len()
            )));
        }
        if predicted.is_empty() {
            return Err(LrrError::InvalidArgument("no labels to score".into()));
        }
        if predicted.iter().any(|&p| p >= k_pred) || truth.iter().any(|&t| t >= k_true) {
            return Err(LrrError::InvalidArgument("label outside its declared range".into()));
        }
        Ok(LabeledPrediction {
            predicted,
            truth,
            k_pred,
            k_true,
        })
    }

    /// Counts taken as one more than the largest id.
    pub fn from_labels(predicted: Vec<usize>, truth: Vec<usize>) -> Result<Self> {
        let k_pred = predicted.iter().max().map_or(0, |m| m + 1);
        let k_true = truth.iter().max().map_or(0, |m| m + 1);
        Self::new(predicted, truth, k_pred, k_true)
    }

    /// `counts[c][t]`: samples in cluster `c` with class `t`.
    pub fn contingency(&self) -> Vec<Vec<usize>> {
        let mut counts = vec![vec![0usize; self.k_true]; self.k_pred];
        for (&p, &t) in self.predicted.iter().zip(&self.truth) {
            counts[p][t] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyStrategy {
    /// Best one-to-one matching of clusters to classes.
    Global,
    /// Each cluster takes its majority class; clusters may share a class.
    Local,
    /// Global below ten clusters, local otherwise.
    Auto,
}

impl std::str::FromStr for AccuracyStrategy {
    type Err = LrrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(AccuracyStrategy::Global),
            "local" => Ok(AccuracyStrategy::Local),
            "auto" => Ok(AccuracyStrategy::Auto),
            other => Err(LrrError::InvalidArgument(format!("unknown accuracy strategy `{other}`"))),
        }
    }
}

/// Fraction of samples whose cluster maps to their class.
pub fn segmentation_accuracy(p: &LabeledPrediction, strategy: AccuracyStrategy) -> Result<f64> {
    let strategy = match strategy {
        AccuracyStrategy::Auto if p.k_pred < 10 => AccuracyStrategy::Global,
        AccuracyStrategy::Auto => AccuracyStrategy::Local,
        s => s,
    };
    let counts = p.contingency();
    let matched = match strategy {
        AccuracyStrategy::Local => counts.iter().map(|row| row.iter().copied().max().unwrap_or(0)).sum(),
        _ => best_matching(&counts, p.k_true)?,
    };
    Ok(matched as f64 / p.predicted.len() as f64)
}

/// Maximum total count over partial injections of clusters into classes,
/// by exhaustive search over subsets of used classes.
fn best_matching(counts: &[Vec<usize>], k_true: usize) -> Result<usize> {
    if k_true > MAX_GLOBAL_CLASSES {
        return Err(LrrError::InvalidArgument(format!(
            "global search supports at most {MAX_GLOBAL_CLASSES} classes, got {k_true}"
        )));
    }
    // best[mask]: best total of the clusters seen so far using exactly the classes in mask
    let size = 1usize << k_true;
    let mut best: Vec<Option<usize>> = vec![None; size];
    best[0] = Some(0);
    for row in counts {
        let mut next = best.clone();
        for mask in 0..size {
            let Some(base) = best[mask] else { continue };
            for (t, &c) in row.iter().enumerate() {
                if mask & (1 << t) == 0 {
                    let slot = &mut next[mask | (1 << t)];
                    *slot = Some(slot.map_or(base + c, |s| s.max(base + c)));
                }
            }
        }
        best = next;
    }
    Ok(best.into_iter().flatten().max().unwrap_or(0))
}

/// Outlier scores with ground truth (`true` = outlier).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredBinary {
    pub scores: Vec<f64>,
    pub truth: Vec<bool>,
}

impl ScoredBinary {
    pub fn new(scores: Vec<f64>, truth: Vec<bool>) -> Result<Self> {
        if scores.len() != truth.len() {
            return Err(LrrError::DimensionMismatch(format!(
                "{} scores for {} truth flags",
                scores.len(),
                truth.len()
            )));
        }
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(LrrError::NonFinite { row: i, col: 0 });
        }
        Ok(ScoredBinary { scores, truth })
    }

    fn class_sizes(&self) -> Result<(usize, usize)> {
        let pos = self.truth.iter().filter(|&&t| t).count();
        let neg = self.truth.len() - pos;
        if pos == 0 || neg == 0 {
            return Err(LrrError::UndefinedMetric(
                "ROC needs at least one positive and one negative".into(),
            ));
        }
        Ok((pos, neg))
    }
}

/// Area under the ROC curve from the rank-sum statistic; tied scores
/// contribute one half.
pub fn auc(s: &ScoredBinary) -> Result<f64> {
    let (pos, neg) = s.class_sizes()?;
    let mut order: Vec<usize> = (0..s.scores.len()).collect();
    order.sort_by(|&a, &b| s.scores[a].total_cmp(&s.scores[b]));
    // midranks, 1-based
    let mut ranks = vec![0.0; order.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && s.scores[order[j + 1]] == s.scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mid;
        }
        i = j + 1;
    }
    let rank_sum: f64 = (0..ranks.len()).filter(|&i| s.truth[i]).map(|i| ranks[i]).sum();
    let u = rank_sum - (pos * (pos + 1)) as f64 / 2.0;
    Ok(u / (pos * neg) as f64)
}

/// ROC points `(false positive rate, true positive rate)` for every distinct
/// threshold, from `(0, 0)` to `(1, 1)`. A sample is flagged when its score is
/// at least the threshold.
pub fn roc_curve(s: &ScoredBinary) -> Result<Vec<(f64, f64)>> {
    let (pos, neg) = s.class_sizes()?;
    let mut thresholds = s.scores.clone();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let mut points = vec![(0.0, 0.0)];
    for t in thresholds {
        let (mut tp, mut fp) = (0, 0);
        for (&score, &is_pos) in s.scores.iter().zip(&s.truth) {
            if score >= t {
                if is_pos {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    Ok(points)
}

/// `||U U^T - V0 V0^T||_F / ||V0 V0^T||_F` with `U` the column basis of `Z*`
/// at [`SOLUTION_RANK_TOL`].
pub fn recovery_error<S: Data<Elem = f64>>(z: &ArrayBase<S, Ix2>, v0: &Matrix) -> Result<f64> {
    recovery_error_with_tol(z, v0, SOLUTION_RANK_TOL)
}

pub fn recovery_error_with_tol<S: Data<Elem = f64>>(z: &ArrayBase<S, Ix2>, v0: &Matrix, rank_tol: f64) -> Result<f64> {
    if z.nrows() != v0.nrows() {
        return Err(LrrError::DimensionMismatch(format!(
            "Z* has {} rows but V0 has {}",
            z.nrows(),
            v0.nrows()
        )));
    }
    let r0 = v0.ncols();
    if r0 == 0 {
        return Err(LrrError::UndefinedMetric("V0 is empty".into()));
    }
    let gram = v0.t().dot(v0) - Matrix::eye(r0);
    if linalg::max_abs(&gram) > 1e-8 {
        return Err(LrrError::InvalidArgument("V0 must have orthonormal columns".into()));
    }
    let u = skinny_svd(z, rank_tol)?.u;
    let overlap: f64 = u.t().dot(v0).iter().map(|x| x * x).sum();
    // ||P - Q||_F^2 = tr P + tr Q - 2 tr PQ for orthogonal projectors
    let sq = (u.ncols() as f64 + r0 as f64 - 2.0 * overlap).max(0.0);
    Ok(sq.sqrt() / (r0 as f64).sqrt())
}

/// `||X - X_r||_F / ||X||_F` for the best rank-`r` approximation `X_r`.
pub fn rank_r_error_level<S: Data<Elem = f64>>(x: &ArrayBase<S, Ix2>, r: usize) -> Result<f64> {
    let (d, n) = x.dim();
    if r == 0 || r > d.min(n) {
        return Err(LrrError::InvalidArgument(format!(
            "need 1 <= r <= {}, got r = {r}",
            d.min(n)
        )));
    }
    let sigma = linalg::singular_values(x)?;
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let tail: f64 = sigma.iter().skip(r).map(|s| s * s).sum();
    Ok((tail / total).sqrt())
}
