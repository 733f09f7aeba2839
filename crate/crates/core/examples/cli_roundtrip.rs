//! Drives the `lrr` command line in-process: writes a CSV, segments it and
//! reads back `result.json`.

use lrr::cli::{io, run};
use lrr::synth::{gen_ensemble, sample, SubspaceMode};

fn main() -> lrr::Result<()> {
    let dir = tempfile::tempdir()?;
    let ens = gen_ensemble(3, 2, 30, SubspaceMode::Independent, 0)?;
    let ds = sample(&ens, 10, 1)?;
    let input = dir.path().join("x.csv");
    let truth = dir.path().join("truth.csv");
    io::write_matrix(&input, &ds.x, false)?;
    io::write_atomic(&truth, io::format_labels(&ds.true_labels).as_bytes())?;
    let out = dir.path().join("out");

    let code = run([
        "lrr", "segment", "--input", input.to_str().unwrap(), "--truth", truth.to_str().unwrap(),
        "--lambda", "1", "--k", "auto", "--out", out.to_str().unwrap(),
    ]);
    println!("exit code {code}");

    let record: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("result.json"))?)?;
    println!("metrics {}", serde_json::to_string_pretty(&record["metrics"])?);
    println!("files   {}", record["files"]);
    Ok(())
}
