//! The `lrr` binary end to end: files written, record contents, exit codes.

use std::path::{Path, PathBuf};
use std::process::Command;

use lrr::cli::io;
use lrr::linalg::Matrix;
use lrr::synth::{gen_ensemble, sample, SubspaceMode, SyntheticDataset};
use serde_json::Value;
use tempfile::TempDir;

fn lrr(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lrr"))
        .args(args)
        .env_remove(lrr::cli::SEED_ENV)
        .output()
        .expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn record(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("result.json")).unwrap()).unwrap()
}

fn write(dir: &TempDir, name: &str, m: &Matrix) -> PathBuf {
    let p = dir.path().join(name);
    io::write_matrix(&p, m, false).unwrap();
    p
}

fn write_labels(dir: &TempDir, name: &str, labels: &[i64]) -> PathBuf {
    let p = dir.path().join(name);
    io::write_atomic(&p, io::format_labels(labels).as_bytes()).unwrap();
    p
}

fn three_subspaces() -> SyntheticDataset {
    let ens = gen_ensemble(3, 3, 40, SubspaceMode::Independent, 11).unwrap();
    sample(&ens, 12, 12).unwrap()
}

#[test]
fn solve_writes_z_e_and_record() {
    let dir = tempfile::tempdir().unwrap();
    let ds = three_subspaces();
    let x = write(&dir, "x.csv", &ds.x);
    let out = dir.path().join("out");
    let (code, err) = lrr(&["solve", "--input", path(&x), "--self", "--lambda", "0.3", "--error-norm", "l21", "--out", path(&out)]);
    assert_eq!(code, 0, "{err}");
    let z = io::read_matrix(&out.join("Z.csv"), false).unwrap();
    let e = io::read_matrix(&out.join("E.csv"), false).unwrap();
    assert_eq!(z.dim(), (36, 36));
    assert_eq!(e.dim(), ds.x.dim());

    let r = record(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["solver"]["converged"], true);
    assert!(r["solver"]["objective_trace"].as_array().unwrap().len() > 1);
    for key in lrr::cli::record::STANDARD_METRICS {
        assert!(r["metrics"][key].is_object(), "{key} missing");
    }

    // every field carries 17 significant digits
    let text = std::fs::read_to_string(out.join("Z.csv")).unwrap();
    let field = text.lines().next().unwrap().split(',').next().unwrap();
    let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{field}");
}

#[test]
fn mismatched_dictionary_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(&dir, "x.csv", &Matrix::ones((4, 3)));
    let a = write(&dir, "a.csv", &Matrix::ones((5, 3)));
    let out = dir.path().join("out");
    let (code, err) = lrr(&["solve", "--input", path(&x), "--dict", path(&a), "--lambda", "1", "--out", path(&out)]);
    assert_eq!(code, 2);
    assert!(err.contains("dimension"), "{err}");
    assert!(!out.join("result.json").exists());
}

#[test]
fn replay_is_byte_identical_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(&dir, "x.csv", &three_subspaces().x);
    let out = dir.path().join("out");
    let args = ["solve", "--input", path(&x), "--lambda", "0.5", "--seed", "9", "--out", path(&out)];
    let strip = |dir: &Path| {
        let mut r = record(dir);
        r.as_object_mut().unwrap().remove("timing");
        (serde_json::to_string(&r).unwrap(), std::fs::read(dir.join("Z.csv")).unwrap())
    };
    assert_eq!(lrr(&args).0, 0);
    let first = strip(&out);
    assert_eq!(lrr(&args).0, 0);
    assert_eq!(first, strip(&out));
}

#[test]
fn segment_with_truth_is_exact_on_clean_data() {
    let dir = tempfile::tempdir().unwrap();
    let ds = three_subspaces();
    let x = write(&dir, "x.csv", &ds.x);
    let truth = write_labels(&dir, "truth.csv", &ds.true_labels);
    let out = dir.path().join("out");
    let (code, err) = lrr(&["segment", "--input", path(&x), "--truth", path(&truth), "--lambda", "1", "--k", "3", "--out", path(&out)]);
    assert_eq!(code, 0, "{err}");
    let r = record(&out);
    assert_eq!(r["metrics"]["accuracy"]["value"], 1.0);
    assert_eq!(r["labels"].as_array().unwrap().len(), 36);
    let labels = io::read_labels(&out.join("labels.csv")).unwrap();
    assert_eq!(labels.len(), 36);
    assert!(out.join("affinity.csv").exists());
}

#[test]
fn segment_estimates_k() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(&dir, "x.csv", &three_subspaces().x);
    let out = dir.path().join("out");
    let (code, err) = lrr(&["segment", "--input", path(&x), "--lambda", "1", "--k", "auto", "--out", path(&out)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(record(&out)["metrics"]["k_hat"]["value"], 3.0);
}

#[test]
fn segment_without_truth_reports_null_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(&dir, "x.csv", &three_subspaces().x);
    for extra in [vec![], vec!["--truth", "/nonexistent/truth.csv"]] {
        let out = dir.path().join("out");
        let mut args = vec!["segment", "--input", path(&x), "--lambda", "1", "--k", "3", "--out", path(&out)];
        args.extend(extra);
        let (code, err) = lrr(&args);
        assert_eq!(code, 0, "{err}");
        let r = record(&out);
        assert_eq!(r["metrics"]["accuracy"]["value"], Value::Null);
        assert_eq!(r["metrics"]["accuracy"]["reason"], "no ground truth");
    }
}

fn fig4_files(dir: &TempDir) -> (PathBuf, PathBuf) {
    let ds = lrr::cli::replicate::fig4_data(0).unwrap();
    (write(dir, "x.csv", &ds.x), write_labels(dir, "truth.csv", &ds.true_labels))
}

#[test]
fn detect_outliers_on_outlier_data() {
    let dir = tempfile::tempdir().unwrap();
    let (x, truth) = fig4_files(&dir);
    let out = dir.path().join("out");
    let (code, err) = lrr(&["detect-outliers", "--input", path(&x), "--truth", path(&truth), "--lambda", "0.25", "--delta", "0.5", "--out", path(&out)]);
    assert_eq!(code, 0, "{err}");
    let r = record(&out);
    assert!(r["metrics"]["auc"]["value"].as_f64().unwrap() >= 0.99);
    let found: Vec<u64> = r["outliers"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(found, (200..250).collect::<Vec<u64>>());
    assert!(out.join("roc.csv").exists());
    assert!(out.join("e_column_norms.csv").exists());

    // a threshold above every column norm flags nothing; no truth means no AUC
    let out = dir.path().join("high");
    let (code, _) = lrr(&["detect-outliers", "--input", path(&x), "--lambda", "0.25", "--delta", "1e6", "--out", path(&out)]);
    assert_eq!(code, 0);
    let r = record(&out);
    assert_eq!(r["outliers"], Value::Array(vec![]));
    assert_eq!(r["metrics"]["auc"]["value"], Value::Null);
    assert_eq!(r["metrics"]["auc"]["reason"], "no ground truth");
    assert!(!out.join("roc.csv").exists());
}

#[test]
fn seed_comes_from_flag_then_environment() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(&dir, "x.csv", &three_subspaces().x);
    let out = dir.path().join("out");
    let run = |seed_flag: Option<&str>, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_lrr"));
        cmd.args(["solve", "--input", path(&x), "--lambda", "1", "--max-iters", "5", "--out", path(&out)]);
        if let Some(s) = seed_flag {
            cmd.args(["--seed", s]);
        }
        cmd.env_remove(lrr::cli::SEED_ENV);
        if let Some(e) = env {
            cmd.env(lrr::cli::SEED_ENV, e);
        }
        let status = cmd.output().unwrap().status;
        (status.code().unwrap(), record(&out)["config"]["seed"].clone())
    };
    assert_eq!(run(None, None).1, 0);
    assert_eq!(run(None, Some("17")).1, 17);
    assert_eq!(run(Some("3"), Some("17")).1, 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(&dir, "x.csv", &three_subspaces().x);
    let out = dir.path().join("out");

    // not converged: results are still written
    let (code, err) = lrr(&["solve", "--input", path(&x), "--lambda", "1", "--max-iters", "3", "--out", path(&out)]);
    assert_eq!(code, 4, "{err}");
    assert_eq!(record(&out)["solver"]["converged"], false);
    assert!(out.join("Z.csv").exists());

    // numerical: the zero matrix has no row space
    let zero = write(&dir, "zero.csv", &Matrix::zeros((3, 4)));
    assert_eq!(lrr(&["solve", "--input", path(&zero), "--lambda", "1", "--out", path(&out)]).0, 3);

    // parse and argument errors
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\n3,oops\n").unwrap();
    assert_eq!(lrr(&["solve", "--input", path(&bad), "--lambda", "1", "--out", path(&out)]).0, 2);
    assert_eq!(lrr(&["solve", "--input", path(&x), "--out", path(&out)]).0, 2);
    assert_eq!(lrr(&["solve", "--input", path(&x), "--lambda", "-1", "--out", path(&out)]).0, 2);
    assert_eq!(lrr(&["segment", "--input", path(&x), "--lambda", "1", "--k", "many", "--out", path(&out)]).0, 2);
    assert_eq!(lrr(&["replicate", "--figure", "fig9", "--out", path(&out)]).0, 2);
    assert_eq!(lrr(&["--help"]).0, 0);
}

#[test]
fn header_and_normalize_options() {
    let dir = tempfile::tempdir().unwrap();
    let ds = three_subspaces();
    let p = dir.path().join("x.csv");
    io::write_matrix(&p, &(&ds.x * 250.0), true).unwrap();
    let out = dir.path().join("out");
    let (code, err) = lrr(&["segment", "--input", path(&p), "--header", "--normalize", "--lambda-preset", "motion", "--k", "3", "--out", path(&out)]);
    assert_eq!(code, 0, "{err}");
    let r = record(&out);
    assert_eq!(r["config"]["solver"]["lambda"], 4.0);
    assert_eq!(r["config"]["normalize"], true);
    let text = std::fs::read_to_string(out.join("affinity.csv")).unwrap();
    assert!(text.starts_with("c0,c1,"));
}

#[test]
fn replicate_fig4_emits_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4");
    let (code, err) = lrr(&["replicate", "--figure", "fig4", "--out", path(&out)]);
    assert_eq!(code, 0, "{err}");
    let r = record(&out);
    assert_eq!(r["metrics"]["all_exact"]["value"], 1.0);
    let sweep = std::fs::read_to_string(out.join("lambda_sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 6);
    for f in ["e_column_norms.csv", "shape_interaction.csv", "true_labels.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
}
