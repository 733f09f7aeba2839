//! Command-line front end: `solve`, `segment`, `replicate` and
//! `detect-outliers`.
//!
//! Every command writes its matrices as CSV and a [`ResultRecord`] as
//! `result.json` into the output directory, each file atomically.
//!
//! Exit codes: 0 success, 2 argument, parse or I/O error, 3 numerical
//! failure, 4 solver did not converge (results are still written).

pub mod io;
pub mod record;
pub mod replicate;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cluster::{segment, ClusterCount, SegmentOptions, DEFAULT_TAU};
use crate::error::{LrrError, Result};
use crate::eval::{
    auc, recovery_error, roc_curve, segmentation_accuracy, AccuracyStrategy, LabeledPrediction, ScoredBinary,
};
use crate::linalg::{column_norms, max_abs, Matrix};
use crate::solver::{solve_lrr, solve_lrr_self, ErrorModel, LrrSolution, SolverOptions};
use record::{ExperimentConfig, Metric, ResultRecord, SolverDiagnostics, Timing};
use replicate::{Figure, LambdaRun};

/// Environment variable overriding the default seed.
pub const SEED_ENV: &str = "LRR_SEED";

/// Lambda used for motion segmentation data.
pub const MOTION_LAMBDA: f64 = 4.0;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lrr", version, about = "Low-rank representation for subspace recovery and segmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve min ||Z||_* + lambda ||E|| s.t. X = AZ + E and write Z, E.
    Solve(SolveArgs),
    /// Segment the columns of X into subspaces.
    Segment(SegmentArgs),
    /// Rerun one of the synthetic experiments.
    Replicate(ReplicateArgs),
    /// Flag columns whose error norm exceeds a threshold.
    DetectOutliers(DetectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LambdaPreset {
    /// lambda = 4
    Motion,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Data matrix X, one sample per column.
    #[arg(long)]
    pub input: PathBuf,
    /// CSV files start with a header row (also written on output).
    #[arg(long)]
    pub header: bool,
    /// Divide X (and the dictionary) by its largest absolute entry.
    #[arg(long)]
    pub normalize: bool,
    /// Scale every column of X to unit length.
    #[arg(long)]
    pub unit_columns: bool,
    /// Output directory.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Seed; defaults to $LRR_SEED or 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, required_unless_present = "lambda_preset", conflicts_with = "lambda_preset")]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub lambda_preset: Option<LambdaPreset>,
    /// l21, l1 or frobenius_sq.
    #[arg(long, default_value = "l21")]
    pub error_norm: ErrorModel,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1.1)]
    pub rho: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e6)]
    pub mu_max: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub eps: f64,
}

impl SolverArgs {
    fn options(&self, seed: u64) -> SolverOptions {
        let lambda = match (self.lambda, self.lambda_preset) {
            (Some(l), _) => l,
            (None, Some(LambdaPreset::Motion)) => MOTION_LAMBDA,
            (None, None) => unreachable!("clap requires one of --lambda, --lambda-preset"),
        };
        SolverOptions {
            lambda,
            mu_init: self.mu,
            mu_max: self.mu_max,
            rho: self.rho,
            eps: self.eps,
            max_iters: self.max_iters,
            seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Dictionary A; without it the data is its own dictionary.
    #[arg(long, conflicts_with = "self_dict")]
    pub dict: Option<PathBuf>,
    /// Use X as the dictionary (the default).
    #[arg(long = "self")]
    pub self_dict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Number of clusters, or `auto` to estimate it.
    #[arg(long)]
    pub k: ClusterCount,
    /// Soft threshold for estimating k.
    #[arg(long, default_value_t = DEFAULT_TAU)]
    pub tau: f64,
    /// Also flag columns of E with norm above delta.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Ground-truth labels, one integer per column, -1 for outliers.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Threshold on the column norms of E.
    #[arg(long)]
    pub delta: f64,
    /// Labels with -1 marking the true outliers.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplicateArgs {
    /// fig3, fig4, fig5a, fig5b or fig6.
    #[arg(long)]
    pub figure: Figure,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Seed; defaults to $LRR_SEED or 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// What a finished command reports back for the exit code.
pub struct Outcome {
    pub record: ResultRecord,
    pub converged: bool,
}

/// Seed from the flag, else `$LRR_SEED`, else 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| LrrError::InvalidArgument(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

pub fn exit_code(err: &LrrError) -> i32 {
    match err {
        LrrError::Numerical { .. } | LrrError::Degenerate(_) | LrrError::Infeasible { .. } | LrrError::UndefinedMetric(_) => {
            EXIT_NUMERICAL
        }
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(outcome) if outcome.converged => EXIT_OK,
        Ok(_) => {
            eprintln!("warning: solver did not converge; results were written anyway");
            EXIT_NOT_CONVERGED
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Solve(a) => cmd_solve(a),
        Command::Segment(a) => cmd_segment(a),
        Command::Replicate(a) => cmd_replicate(a),
        Command::DetectOutliers(a) => cmd_detect_outliers(a),
    }
}

fn normalize_entries(m: &mut Matrix) {
    let scale = max_abs(m);
    if scale > 0.0 {
        m.mapv_inplace(|v| v / scale);
    }
}

fn normalize_columns(m: &mut Matrix) {
    let norms = column_norms(m);
    for (mut col, &n) in m.columns_mut().into_iter().zip(norms.iter()) {
        if n > 0.0 {
            col.mapv_inplace(|v| v / n);
        }
    }
}

fn load(input: &InputArgs, path: &Path) -> Result<Matrix> {
    let mut m = io::read_matrix(path, input.header)?;
    if input.normalize {
        normalize_entries(&mut m);
    }
    if input.unit_columns {
        normalize_columns(&mut m);
    }
    Ok(m)
}

fn base_config(command: &str, input: &InputArgs, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        command: command.to_string(),
        input: Some(input.input.clone()),
        dictionary: None,
        truth: None,
        figure: None,
        error_model: None,
        solver: None,
        k: None,
        tau: None,
        delta: None,
        seed,
        normalize: input.normalize,
        unit_columns: input.unit_columns,
        header: input.header,
        output: input.out.clone(),
    }
}

struct Output<'a> {
    dir: &'a Path,
    record: &'a mut ResultRecord,
}

impl Output<'_> {
    fn matrix(&mut self, role: &str, name: &str, m: &Matrix, header: bool) -> Result<()> {
        io::write_matrix(&self.dir.join(name), m, header)?;
        self.record.files.insert(role.to_string(), name.to_string());
        Ok(())
    }

    fn text(&mut self, role: &str, name: &str, text: &str) -> Result<()> {
        io::write_atomic(&self.dir.join(name), text.as_bytes())?;
        self.record.files.insert(role.to_string(), name.to_string());
        Ok(())
    }

    fn table(&mut self, role: &str, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        io::write_table(&self.dir.join(name), header, rows)?;
        self.record.files.insert(role.to_string(), name.to_string());
        Ok(())
    }
}

fn finish(dir: &Path, mut record: ResultRecord, start: Instant, converged: bool) -> Result<Outcome> {
    record.timing = Timing {
        seconds: start.elapsed().as_secs_f64(),
    };
    io::write_atomic(&dir.join("result.json"), record.to_json().as_bytes())?;
    Ok(Outcome { record, converged })
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs) -> Result<Outcome> {
    let start = Instant::now();
    let seed = resolve_seed(args.input.seed)?;
    let opts = args.solver.options(seed);
    opts.validate()?;
    let x = load(&args.input, &args.input.input)?;
    let dict = match &args.dict {
        Some(path) => {
            let mut a = io::read_matrix(path, args.input.header)?;
            if args.input.normalize {
                normalize_entries(&mut a);
            }
            Some(a)
        }
        None => None,
    };
    let solution = match &dict {
        Some(a) => solve_lrr(&x, a, args.solver.error_norm, &opts)?,
        None => solve_lrr_self(&x, args.solver.error_norm, &opts)?,
    };

    let mut config = base_config("solve", &args.input, seed);
    config.dictionary = args.dict.clone();
    config.error_model = Some(args.solver.error_norm);
    config.solver = Some(opts);
    let mut record = ResultRecord::new(config, "not computed by solve");
    record.solver = Some(SolverDiagnostics::from(&solution));
    prepare_dir(&args.input.out)?;
    let mut out = Output {
        dir: &args.input.out,
        record: &mut record,
    };
    out.matrix("z", "Z.csv", &solution.z, args.input.header)?;
    out.matrix("e", "E.csv", &solution.e, args.input.header)?;
    finish(&args.input.out, record, start, solution.converged)
}

/// Truth labels, or `None` when no file was given or it does not exist.
fn read_truth(path: Option<&Path>, n: usize) -> Result<Option<Vec<i64>>> {
    let Some(path) = path else { return Ok(None) };
    if !path.exists() {
        eprintln!("warning: truth file {} not found; metrics needing it are null", path.display());
        return Ok(None);
    }
    let labels = io::read_labels(path)?;
    if labels.len() != n {
        return Err(LrrError::DimensionMismatch(format!(
            "{} truth labels for {n} columns",
            labels.len()
        )));
    }
    Ok(Some(labels))
}

/// Accuracy over the columns whose truth label is not -1.
fn truth_accuracy(labels: &[usize], k: usize, truth: &[i64]) -> Result<f64> {
    let idx: Vec<usize> = (0..truth.len()).filter(|&i| truth[i] >= 0).collect();
    if idx.is_empty() {
        return Err(LrrError::UndefinedMetric("every column is labeled as an outlier".into()));
    }
    let predicted = idx.iter().map(|&i| labels[i]).collect();
    let truth_ids: Vec<usize> = idx.iter().map(|&i| truth[i] as usize).collect();
    let k_true = truth_ids.iter().max().map_or(0, |m| m + 1);
    let p = LabeledPrediction::new(predicted, truth_ids, k, k_true)?;
    segmentation_accuracy(&p, AccuracyStrategy::Auto)
}

fn outlier_scores(e: &Matrix, truth: &[i64]) -> Result<ScoredBinary> {
    ScoredBinary::new(column_norms(e).to_vec(), truth.iter().map(|&t| t < 0).collect())
}

pub fn cmd_segment(args: &SegmentArgs) -> Result<Outcome> {
    let start = Instant::now();
    let seed = resolve_seed(args.input.seed)?;
    let opts = args.solver.options(seed);
    opts.validate()?;
    let x = load(&args.input, &args.input.input)?;
    let truth = read_truth(args.truth.as_deref(), x.ncols())?;
    let seg_opts = SegmentOptions {
        k: args.k,
        model: args.solver.error_norm,
        solver: opts,
        tau: args.tau,
        delta: args.delta,
        seed,
    };
    let result = segment(&x, &seg_opts)?;

    let mut config = base_config("segment", &args.input, seed);
    config.truth = args.truth.clone();
    config.error_model = Some(args.solver.error_norm);
    config.solver = Some(opts);
    config.k = Some(args.k);
    config.tau = Some(args.tau);
    config.delta = args.delta;
    let mut record = ResultRecord::new(config, "no ground truth");
    record.solver = Some(SolverDiagnostics::from(&result.solution));
    record.set(
        "k_hat",
        match result.k_hat {
            Some(k) => Metric::value(k as f64),
            None => Metric::missing("k was given"),
        },
    );
    record.set("recovery_error", Metric::missing("row space of the clean data is unknown"));
    if let Some(truth) = &truth {
        record.set("accuracy", metric_of(truth_accuracy(&result.labels, result.k, truth)));
        record.set("auc", metric_of(outlier_scores(&result.solution.e, truth).and_then(|s| auc(&s))));
    }
    record.labels = Some(result.labels.clone());
    record.outliers = args.delta.map(|_| result.outliers.clone());
    prepare_dir(&args.input.out)?;
    let mut out = Output {
        dir: &args.input.out,
        record: &mut record,
    };
    out.text("labels", "labels.csv", &io::format_labels(&result.labels))?;
    out.matrix("affinity", "affinity.csv", &result.affinity.w, args.input.header)?;
    finish(&args.input.out, record, start, result.solution.converged)
}

/// Converts an undefined metric into a null with its reason.
fn metric_of(value: Result<f64>) -> Metric {
    match value {
        Ok(v) => Metric::value(v),
        Err(e) => Metric::missing(e.to_string()),
    }
}

fn roc_rows(s: &ScoredBinary) -> Result<Vec<Vec<String>>> {
    Ok(roc_curve(s)?
        .into_iter()
        .map(|(fpr, tpr)| vec![fpr.to_string(), tpr.to_string()])
        .collect())
}

pub fn cmd_detect_outliers(args: &DetectArgs) -> Result<Outcome> {
    let start = Instant::now();
    let seed = resolve_seed(args.input.seed)?;
    let opts = args.solver.options(seed);
    opts.validate()?;
    if !(args.delta > 0.0) {
        return Err(LrrError::InvalidArgument(format!("delta must be positive, got {}", args.delta)));
    }
    let x = load(&args.input, &args.input.input)?;
    let truth = read_truth(args.truth.as_deref(), x.ncols())?;
    let solution = solve_lrr_self(&x, args.solver.error_norm, &opts)?;
    let outliers = crate::cluster::detect_outliers(&solution.e, args.delta)?;

    let mut config = base_config("detect-outliers", &args.input, seed);
    config.truth = args.truth.clone();
    config.error_model = Some(args.solver.error_norm);
    config.solver = Some(opts);
    config.delta = Some(args.delta);
    let mut record = ResultRecord::new(config, "no ground truth");
    record.solver = Some(SolverDiagnostics::from(&solution));
    record.set("accuracy", Metric::missing("not computed by detect-outliers"));
    record.set("k_hat", Metric::missing("not computed by detect-outliers"));
    record.set("recovery_error", Metric::missing("row space of the clean data is unknown"));
    record.outliers = Some(outliers);
    prepare_dir(&args.input.out)?;
    let norms: Vec<Vec<String>> = column_norms(&solution.e)
        .iter()
        .enumerate()
        .map(|(i, n)| vec![i.to_string(), format!("{n:.16e}")])
        .collect();
    let mut roc = None;
    if let Some(truth) = &truth {
        let scores = outlier_scores(&solution.e, truth)?;
        record.set("auc", metric_of(auc(&scores)));
        roc = roc_rows(&scores).ok();
    }
    let mut out = Output {
        dir: &args.input.out,
        record: &mut record,
    };
    out.table("e_column_norms", "e_column_norms.csv", &["column", "norm"], &norms)?;
    if let Some(rows) = roc {
        out.table("roc", "roc.csv", &["fpr", "tpr"], &rows)?;
    }
    out.matrix("e", "E.csv", &solution.e, args.input.header)?;
    finish(&args.input.out, record, start, solution.converged)
}

fn replicate_config(args: &ReplicateArgs, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        command: "replicate".into(),
        input: None,
        dictionary: None,
        truth: None,
        figure: Some(args.figure.to_string()),
        error_model: Some(ErrorModel::L21),
        solver: None,
        k: None,
        tau: None,
        delta: None,
        seed,
        normalize: false,
        unit_columns: args.figure != Figure::Fig3,
        header: false,
        output: args.out.clone(),
    }
}

const RUN_HEADER: [&str; 11] = [
    "lambda",
    "recovery_error",
    "rank",
    "max_clean_norm",
    "min_planted_norm",
    "detected_exact",
    "exact",
    "auc",
    "accuracy",
    "iterations",
    "seconds",
];

fn run_row(r: &LambdaRun) -> Vec<String> {
    vec![
        r.lambda.to_string(),
        format!("{:.6e}", r.recovery_error),
        r.rank.to_string(),
        format!("{:.6e}", r.max_clean_norm),
        format!("{:.6e}", r.min_planted_norm),
        r.detected_exact.to_string(),
        r.exact.to_string(),
        r.auc.to_string(),
        r.accuracy.to_string(),
        r.solution.iterations.to_string(),
        format!("{:.3}", r.seconds),
    ]
}

fn record_run(record: &mut ResultRecord, run: &LambdaRun) {
    record.solver = Some(SolverDiagnostics::from(&run.solution));
    record.set("recovery_error", Metric::value(run.recovery_error));
    record.set("auc", Metric::value(run.auc));
    record.set("accuracy", Metric::value(run.accuracy));
    record.outliers = Some(run.detected.clone());
}

fn shape_interaction_of(solution: &LrrSolution) -> Result<Matrix> {
    let u = crate::linalg::skinny_svd(&solution.z, crate::linalg::SOLUTION_RANK_TOL)?.u;
    Ok(u.dot(&u.t()))
}

pub fn cmd_replicate(args: &ReplicateArgs) -> Result<Outcome> {
    let start = Instant::now();
    let seed = resolve_seed(args.seed)?;
    let mut record = ResultRecord::new(replicate_config(args, seed), "not reported for this figure");
    record.set("k_hat", Metric::missing("k is fixed by the recipe"));
    prepare_dir(&args.out)?;
    let dir = args.out.as_path();
    let mut converged = true;
    match args.figure {
        Figure::Fig3 => {
            let rep = replicate::fig3(seed)?;
            record.solver = Some(SolverDiagnostics::from(&rep.solution));
            record.set("accuracy", Metric::value(rep.accuracy));
            record.set("accuracy_global", Metric::value(rep.accuracy_global));
            record.set("shape_interaction_accuracy", Metric::value(rep.shape_interaction_accuracy));
            record.set("recovery_error", metric_of(recovery_error(&rep.solution.z, &rep.dataset.v0)));
            record.set("auc", Metric::missing("no outliers in this figure"));
            record.labels = Some(rep.labels.clone());
            converged = rep.solution.converged;
            let mut out = Output { dir, record: &mut record };
            out.matrix("shape_interaction", "shape_interaction.csv", &rep.shape_interaction, false)?;
            out.matrix("affinity", "affinity.csv", &rep.affinity.w, false)?;
            out.text("true_labels", "true_labels.csv", &io::format_labels(&rep.dataset.true_labels))?;
        }
        Figure::Fig4 => {
            let rep = replicate::fig4(seed)?;
            let mid = rep
                .runs
                .iter()
                .find(|r| r.lambda == 0.25)
                .unwrap_or(&rep.runs[0]);
            record_run(&mut record, mid);
            record.set("all_exact", Metric::value(if rep.all_exact() { 1.0 } else { 0.0 }));
            for r in &rep.runs {
                record.set(&format!("exact_at_{}", r.lambda), Metric::value(if r.exact { 1.0 } else { 0.0 }));
                converged &= r.solution.converged;
            }
            let rows: Vec<Vec<String>> = rep.runs.iter().map(run_row).collect();
            let mut norm_rows = Vec::new();
            let per_run: Vec<_> = rep.runs.iter().map(|r| column_norms(&r.solution.e)).collect();
            for i in 0..rep.dataset.x.ncols() {
                let mut row = vec![i.to_string(), (rep.dataset.true_labels[i] < 0).to_string()];
                row.extend(per_run.iter().map(|n| format!("{:.6e}", n[i])));
                norm_rows.push(row);
            }
            let lambda_names: Vec<String> = rep.runs.iter().map(|r| format!("lambda_{}", r.lambda)).collect();
            let mut norm_header = vec!["column", "outlier"];
            norm_header.extend(lambda_names.iter().map(String::as_str));
            let uut = shape_interaction_of(&mid.solution)?;
            let mut out = Output { dir, record: &mut record };
            out.table("lambda_sweep", "lambda_sweep.csv", &RUN_HEADER, &rows)?;
            out.table("e_column_norms", "e_column_norms.csv", &norm_header, &norm_rows)?;
            out.matrix("shape_interaction", "shape_interaction.csv", &uut, false)?;
            out.text("true_labels", "true_labels.csv", &io::format_labels(&rep.dataset.true_labels))?;
        }
        Figure::Fig5a | Figure::Fig5b => {
            let scale = if args.figure == Figure::Fig5a {
                replicate::FIG5_SCALES[0]
            } else {
                replicate::FIG5_SCALES[1]
            };
            let rep = replicate::fig5(seed, scale)?;
            record_run(&mut record, &rep.chosen);
            record.set("lambda", Metric::value(rep.chosen.lambda));
            record.set("corrupted_degree", Metric::value(rep.corrupted_degree));
            converged = rep.chosen.solution.converged;
            let rows: Vec<Vec<String>> = rep
                .sweep
                .iter()
                .map(|(l, ok)| vec![l.to_string(), ok.to_string()])
                .collect();
            let uut = shape_interaction_of(&rep.chosen.solution)?;
            let corrupted: Vec<i64> = (0..rep.dataset.x.ncols())
                .map(|i| rep.dataset.corrupted_indices.binary_search(&i).is_ok() as i64)
                .collect();
            let mut out = Output { dir, record: &mut record };
            out.table("lambda_sweep", "lambda_sweep.csv", &["lambda", "separable"], &rows)?;
            out.matrix("shape_interaction", "shape_interaction.csv", &uut, false)?;
            out.text("corrupted", "corrupted.csv", &io::format_labels(&corrupted))?;
        }
        Figure::Fig6 => {
            let rep = replicate::fig6(seed)?;
            record_run(&mut record, &rep.run);
            record.set("error_ratio", Metric::value(rep.dataset.error_ratio()));
            record.set("noise_level", Metric::value(rep.noise_level));
            converged = rep.run.solution.converged;
            let uut = shape_interaction_of(&rep.run.solution)?;
            let norms: Vec<Vec<String>> = column_norms(&rep.run.solution.e)
                .iter()
                .enumerate()
                .map(|(i, n)| vec![i.to_string(), rep.dataset.true_labels[i].to_string(), format!("{n:.6e}")])
                .collect();
            let mut out = Output { dir, record: &mut record };
            out.table("e_column_norms", "e_column_norms.csv", &["column", "label", "norm"], &norms)?;
            out.matrix("shape_interaction", "shape_interaction.csv", &uut, false)?;
        }
    }
    finish(dir, record, start, converged)
}
