//! Segmentation accuracy, ROC/AUC and row-space recovery error.

use lrr::eval::{
    auc, rank_r_error_level, recovery_error, roc_curve, segmentation_accuracy, AccuracyStrategy,
    LabeledPrediction, ScoredBinary,
};
use ndarray::array;

fn main() -> lrr::Result<()> {
    // cluster 2 swallowed most of class 1; local majority forgives that
    let p = LabeledPrediction::from_labels(vec![0, 0, 1, 2, 2, 2], vec![0, 0, 1, 1, 1, 2])?;
    for s in [AccuracyStrategy::Global, AccuracyStrategy::Local] {
        println!("{s:?} accuracy {:.3}", segmentation_accuracy(&p, s)?);
    }

    let scored = ScoredBinary::new(vec![0.1, 0.4, 0.35, 0.8], vec![false, false, true, true])?;
    println!("\nAUC {}", auc(&scored)?);
    for (fpr, tpr) in roc_curve(&scored)? {
        println!("  fpr {fpr:.2} tpr {tpr:.2}");
    }

    let v0 = array![[1.0], [0.0], [0.0]];
    let z = array![[2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
    println!("\nrecovery error, same row space: {}", recovery_error(&z, &v0)?);
    let z = array![[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]];
    println!("recovery error, orthogonal:     {}", recovery_error(&z, &v0)?);

    let x = array![[3.0, 0.0], [0.0, 4.0]];
    println!("\nrank-1 error level {}", rank_r_error_level(&x, 1)?);
    Ok(())
}
