//! Subspace segmentation end to end, with a fixed and an estimated number
//! of clusters.

use lrr::cluster::{segment, ClusterCount, SegmentOptions};
use lrr::eval::{segmentation_accuracy, AccuracyStrategy, LabeledPrediction};
use lrr::synth::{gen_ensemble, sample, shuffle, SubspaceMode};

fn main() -> lrr::Result<()> {
    // 11 pairwise disjoint (but dependent) 20-dim subspaces in R^200
    let ds = lrr::cli::replicate::fig3_data(0)?;
    let res = segment(&ds.x, &SegmentOptions::new(ClusterCount::Fixed(11), 0.25))?;
    let truth: Vec<usize> = ds.true_labels.iter().map(|&l| l as usize).collect();
    let p = LabeledPrediction::from_labels(res.labels.clone(), truth)?;
    println!(
        "dependent subspaces: accuracy {:.3} in {} iterations",
        segmentation_accuracy(&p, AccuracyStrategy::Auto)?,
        res.solution.iterations
    );

    // unknown k
    let ens = gen_ensemble(4, 3, 60, SubspaceMode::Independent, 3)?;
    let ds = shuffle(&sample(&ens, 15, 4)?, 5);
    let res = segment(&ds.x, &SegmentOptions::new(ClusterCount::Auto, 1.0))?;
    let spectrum = res.spectrum.as_ref().expect("auto k keeps the spectrum");
    println!("\nsmallest Laplacian eigenvalues {:.3?}", &spectrum.sigma[..6]);
    println!("k_hat = {:?}", res.k_hat);
    println!("labels {:?}", res.labels);
    Ok(())
}
