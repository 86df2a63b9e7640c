//! Command-line front end: `generate`, `train`, `eval`, `compare`, `simulate`.
//!
//! Exit codes: 0 success, 2 usage or configuration error (including missing
//! input files and unusable output locations), 3 data or schema error, 4 any
//! other I/O failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use log::info;

use crate::baselines::FeatureMap;
use crate::channelsim::{gen_dataset, gen_trajectory, LinkSample, ScenarioConfig};
use crate::dataset::{label, read_csv, split, write_csv, Dataset, Feature, LabelRule};
use crate::error::{Error, Result};
use crate::metrics::svg::{line_plot, Series};
use crate::metrics::{compare, curve_csv, reports_csv, CurvePoint, EvalReport};
use crate::model::{Classifier, Model, ModelFile, PathLossOracle, Provenance};
use crate::pipeline::{evaluate, fit, FitOptions, ModelKind};
use crate::relay::{group_instances, handover_sim, select_oracle, select_predicted, wilson_interval};
use crate::rng::SEED_ENV;

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "relaylearn", version, about = "Learned relay selection for mmWave links")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a labelled link dataset (or a mobility trajectory) as CSV.
    Generate(GenerateArgs),
    /// Train one model on the seeded training split of a dataset.
    Train(TrainArgs),
    /// Evaluate a saved model on the held-out split it was trained against.
    Eval(EvalArgs),
    /// Evaluate several saved models and rank them.
    Compare(CompareArgs),
    /// Run relay selection and handover over a trajectory.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
#[command(rename_all = "snake_case")]
pub struct GenerateArgs {
    /// Scenario JSON; flags given alongside override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of links (`n_samples`).
    #[arg(long, alias = "n_samples")]
    pub n: Option<usize>,
    #[arg(long, env = SEED_ENV)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub d_min: Option<f64>,
    #[arg(long)]
    pub d_max: Option<f64>,
    #[arg(long)]
    pub freq_ghz: Option<f64>,
    #[arg(long)]
    pub bandwidth_mhz: Option<f64>,
    #[arg(long)]
    pub tx_power_dbm: Option<f64>,
    #[arg(long)]
    pub n_candidates: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub threshold_db: Option<f64>,
    /// Emit a trajectory of this many steps instead of independent links.
    #[arg(long)]
    pub trajectory_steps: Option<usize>,
    /// Per-step distance jitter (std dev, metres) for trajectories.
    #[arg(long, default_value_t = 0.5)]
    pub step_m: f64,
    #[arg(short = 'o', long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
#[command(rename_all = "snake_case")]
pub struct TrainArgs {
    /// m1..m6, logreg, dummy or svm.
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.75)]
    pub train_fraction: f64,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Accepts `inf`.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub n_iter_no_change: Option<usize>,
    /// SVM regularization weight.
    #[arg(long)]
    pub c: Option<f64>,
    /// SVM feature map: identity or poly4.
    #[arg(long, value_parser = parse_feature_map)]
    pub feature_map: Option<FeatureMap>,
    /// Comma-separated learning features; defaults to the standard six.
    #[arg(long, value_delimiter = ',', value_parser = parse_feature)]
    pub features: Option<Vec<Feature>>,
    /// Relabel the data with this threshold before splitting.
    #[arg(long)]
    pub threshold_db: Option<f64>,
    /// Model name recorded in the file; defaults to the `--model` value.
    #[arg(long)]
    pub name: Option<String>,
    /// Model JSON path; defaults to `<name>.json`. The loss history is written
    /// next to it as `<stem>.loss.csv`.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    /// Also write a loss-curve SVG next to the model.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
#[command(rename_all = "snake_case")]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Score every row instead of the recorded held-out split.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
#[command(rename_all = "snake_case")]
pub struct CompareArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub models: Vec<PathBuf>,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
#[command(rename_all = "snake_case")]
pub struct SimulateArgs {
    /// Model JSON, or the literal `oracle` for the true-path-loss scorer.
    #[arg(long)]
    pub model: String,
    /// Trajectory CSV.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub n_candidates: usize,
    /// Outage threshold; defaults to the model's label rule (else 120 dB).
    #[arg(long)]
    pub threshold_db: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub hysteresis_db: f64,
    #[arg(long, default_value_t = 10.0)]
    pub oracle_scale_db: f64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

fn parse_feature_map(s: &str) -> std::result::Result<FeatureMap, String> {
    match s {
        "identity" => Ok(FeatureMap::Identity),
        "poly4" => Ok(FeatureMap::Poly4),
        _ => Err(format!("expected identity or poly4, got '{s}'")),
    }
}

fn parse_feature(s: &str) -> std::result::Result<Feature, String> {
    s.trim().parse().map_err(|e: Error| e.to_string())
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        Error::Io { .. } => 4,
        _ => 3,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate(a) => cmd_generate(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Simulate(a) => cmd_simulate(&a),
    }
}

// ---------------------------------------------------------------------------
// Path checks and writers

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!("input file not found: {}", path.display())))
    }
}

/// Fails with a configuration error unless `path` can be created.
fn require_writable(path: &Path) -> Result<()> {
    fs::File::create(path)
        .map(drop)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create output directory {}: {e}", dir.display())))?;
    require_writable(&dir.join(".relaylearn-probe"))?;
    let _ = fs::remove_file(dir.join(".relaylearn-probe"));
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn xy(points: &[CurvePoint]) -> Vec<(f64, f64)> {
    points.iter().map(|p| (p.x, p.y)).collect()
}

fn loss_points(history: &[f64]) -> Vec<(f64, f64)> {
    history.iter().enumerate().map(|(i, &l)| ((i + 1) as f64, l)).collect()
}

// ---------------------------------------------------------------------------
// generate

fn scenario_from(a: &GenerateArgs) -> Result<ScenarioConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            require_file(p)?;
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("scenario config {}: {e}", p.display())))?
        }
        None => ScenarioConfig::default(),
    };
    macro_rules! set {
        ($($flag:ident => $($field:ident).+),* $(,)?) => {
            $(if let Some(v) = a.$flag { cfg.$($field).+ = v; })*
        };
    }
    set!(
        n => n_samples,
        seed => seed,
        d_min => d_min,
        d_max => d_max,
        freq_ghz => freq_ghz,
        bandwidth_mhz => bandwidth_mhz,
        tx_power_dbm => tx_power_dbm,
        n_candidates => n_candidates,
        alpha => fi.alpha,
        beta => fi.beta,
        sigma => fi.sigma,
    );
    if cfg.n_samples == 0 {
        return Err(Error::Config("n must be >= 1".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let cfg = scenario_from(a)?;
    let rule = match a.threshold_db {
        Some(t) => LabelRule::new(t).map_err(|e| Error::Config(e.to_string()))?,
        None => LabelRule::default(),
    };
    if a.trajectory_steps == Some(0) {
        return Err(Error::Config("trajectory_steps must be >= 1".into()));
    }
    require_writable(&a.output)?;

    let mut samples = match a.trajectory_steps {
        Some(steps) => gen_trajectory(&cfg, steps, a.step_m)?,
        None => gen_dataset(&cfg)?,
    };
    if a.threshold_db.is_some() {
        for s in &mut samples {
            s.label = label(s.path_loss_db, &rule)?;
        }
    }
    write_csv(&samples, &a.output)?;

    let strong = samples.iter().filter(|s| s.label == 1).count();
    println!(
        "wrote {} samples to {}: {} strong, {} weak ({:.4} strong)",
        samples.len(),
        a.output.display(),
        strong,
        samples.len() - strong,
        strong as f64 / samples.len() as f64
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// train

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let kind: ModelKind = a.model.parse()?;
    require_file(&a.data)?;
    if !(a.train_fraction > 0.0 && a.train_fraction < 1.0) {
        return Err(Error::Config(format!(
            "train_fraction must be in (0, 1), got {}",
            a.train_fraction
        )));
    }
    let rule = match a.threshold_db {
        Some(t) => LabelRule::new(t).map_err(|e| Error::Config(e.to_string()))?,
        None => LabelRule::default(),
    };
    let name = a.name.clone().unwrap_or_else(|| kind.to_string());
    let output = a.output.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.json")));
    let loss_path = output.with_extension("loss.csv");
    require_writable(&output)?;

    let features = a.features.clone().unwrap_or_else(|| Feature::DEFAULT.to_vec());
    let mut ds = Dataset::new(read_csv(&a.data)?, features)?;
    let digest = ds.digest();
    if a.threshold_db.is_some() {
        ds.relabel(&rule)?;
    }
    let (train, _) = split(&ds, a.train_fraction, a.seed)?;
    let positives = train.labels().iter().filter(|&&y| y == 1).count();
    if positives == 0 || positives == train.len() {
        return Err(Error::Data(format!(
            "training split holds a single class ({} rows, all label {})",
            train.len(),
            u8::from(positives > 0)
        )));
    }

    let opts = FitOptions {
        seed: a.seed,
        learning_rate: a.learning_rate,
        max_epochs: a.max_epochs,
        batch_size: a.batch_size,
        tol: a.tol,
        n_iter_no_change: a.n_iter_no_change,
        c: a.c,
        feature_map: a.feature_map,
    };
    let model = fit(kind, &train, &opts)?;
    let file = ModelFile {
        name,
        provenance: Some(Provenance {
            seed: a.seed,
            train_fraction: a.train_fraction,
            dataset_rows: ds.len(),
            dataset_digest: digest,
            label_rule: rule,
        }),
        model,
    };
    file.save(&output)?;

    let history = file.model.loss_history();
    let mut csv = String::from("epoch,loss\n");
    for (i, l) in history.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, l));
    }
    write_text(&loss_path, &csv)?;
    if a.svg {
        let pts = loss_points(history);
        let svg = line_plot(
            &format!("{} training loss", file.name),
            "epoch",
            "loss",
            &[Series { name: &file.name, points: &pts }],
            false,
        );
        write_text(&output.with_extension("loss.svg"), &svg)?;
    }

    match history.last() {
        Some(l) => println!("{}: epochs_run {}, final loss {l}", file.name, history.len()),
        None => println!("{}: epochs_run 0 (closed-form fit)", file.name),
    }
    println!("wrote {} and {}", output.display(), loss_path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// eval / compare

/// The rows a saved model should be scored on: the recorded held-out split,
/// or every row with `full` (or when the model records no provenance).
fn test_rows(file: &ModelFile, samples: Vec<LinkSample>, full: bool) -> Result<Dataset> {
    let mut ds = Dataset::new(samples, file.model.features().to_vec())?;
    let Some(p) = &file.provenance else {
        return Ok(ds);
    };
    if !full && (ds.len() != p.dataset_rows || ds.digest() != p.dataset_digest) {
        return Err(Error::Data(format!(
            "dataset does not match model '{}' ({} rows recorded, {} given); pass --full to score every row",
            file.name,
            p.dataset_rows,
            ds.len()
        )));
    }
    ds.relabel(&p.label_rule)?;
    if full {
        return Ok(ds);
    }
    Ok(split(&ds, p.train_fraction, p.seed)?.1)
}

fn eval_file(file: &ModelFile, samples: Vec<LinkSample>, full: bool) -> Result<EvalReport> {
    let test = test_rows(file, samples, full)?;
    evaluate(&file.name, &file.model, &test)
}

fn load_model(path: &Path) -> Result<ModelFile> {
    require_file(path)?;
    ModelFile::load(path)
}

fn write_curves(dir: &Path, prefix: &str, r: &EvalReport) -> Result<()> {
    write_text(&dir.join(format!("{prefix}roc.csv")), &curve_csv("fpr", "tpr", &r.roc_points))?;
    write_text(&dir.join(format!("{prefix}pr.csv")), &curve_csv("recall", "precision", &r.pr_points))
}

type Named = (String, Vec<(f64, f64)>);

fn plot(title: &str, x_label: &str, y_label: &str, data: &[Named], unit_axes: bool) -> String {
    let series: Vec<Series<'_>> = data.iter().map(|(n, p)| Series { name: n, points: p }).collect();
    line_plot(title, x_label, y_label, &series, unit_axes)
}

/// ROC, PR and (where any model has one) loss-history plots.
fn write_plots(dir: &Path, reports: &[EvalReport], losses: &[(String, Vec<f64>)]) -> Result<()> {
    let roc: Vec<Named> = reports.iter().map(|r| (r.model_name.clone(), xy(&r.roc_points))).collect();
    let pr: Vec<Named> = reports.iter().map(|r| (r.model_name.clone(), xy(&r.pr_points))).collect();
    let loss: Vec<Named> = losses
        .iter()
        .filter(|(_, h)| !h.is_empty())
        .map(|(n, h)| (n.clone(), loss_points(h)))
        .collect();
    write_text(&dir.join("roc.svg"), &plot("ROC", "false positive rate", "true positive rate", &roc, true))?;
    write_text(&dir.join("pr.svg"), &plot("Precision-recall", "recall", "precision", &pr, true))?;
    if !loss.is_empty() {
        write_text(&dir.join("loss.svg"), &plot("Training loss", "epoch", "loss", &loss, false))?;
    }
    Ok(())
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let file = load_model(&a.model)?;
    require_file(&a.data)?;
    prepare_dir(&a.out_dir)?;
    let r = eval_file(&file, read_csv(&a.data)?, a.full)?;

    write_text(&a.out_dir.join("report.json"), &to_json(&r)?)?;
    write_text(&a.out_dir.join("report.csv"), &reports_csv(std::slice::from_ref(&r)))?;
    write_curves(&a.out_dir, "", &r)?;
    if a.svg {
        let losses = [(file.name.clone(), file.model.loss_history().to_vec())];
        write_plots(&a.out_dir, std::slice::from_ref(&r), &losses)?;
    }
    println!(
        "{}: n {} accuracy {} precision {} recall {} f1 {} roc_auc {}",
        r.model_name, r.n, r.accuracy, r.precision, r.recall, r.f1, r.roc_auc
    );
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> Result<()> {
    let files = a.models.iter().map(|p| load_model(p)).collect::<Result<Vec<_>>>()?;
    require_file(&a.data)?;
    prepare_dir(&a.out_dir)?;
    let samples = read_csv(&a.data)?;

    // One thread per model; results are joined in input order, then ranked.
    let reports = std::thread::scope(|scope| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| {
                let samples = samples.clone();
                scope.spawn(move || eval_file(f, samples, a.full))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let ranked = compare(reports);

    write_text(&a.out_dir.join("compare.csv"), &reports_csv(&ranked))?;
    write_text(&a.out_dir.join("compare.json"), &to_json(&ranked)?)?;
    for r in &ranked {
        write_curves(&a.out_dir, &format!("{}_", r.model_name), r)?;
    }
    if a.svg {
        let losses: Vec<_> = files
            .iter()
            .map(|f| (f.name.clone(), f.model.loss_history().to_vec()))
            .collect();
        write_plots(&a.out_dir, &ranked, &losses)?;
    }
    for (i, r) in ranked.iter().enumerate() {
        println!(
            "{}. {} accuracy {} roc_auc {} f1 {}",
            i + 1,
            r.model_name,
            r.accuracy,
            r.roc_auc,
            r.f1
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, serde::Serialize)]
struct SimulationSummary<'a> {
    model: &'a str,
    n_steps: usize,
    n_candidates: usize,
    threshold_db: f64,
    hysteresis_db: f64,
    switch_count: usize,
    outage_fraction: f64,
    selection_accuracy: f64,
    selection_accuracy_ci95: [f64; 2],
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let file = if a.model == "oracle" {
        let rule = LabelRule::new(a.threshold_db.unwrap_or(LabelRule::default().threshold_db))
            .map_err(|e| Error::Config(e.to_string()))?;
        ModelFile {
            name: "oracle".into(),
            provenance: None,
            model: Model::Oracle(PathLossOracle::new(&rule, a.oracle_scale_db)?),
        }
    } else {
        load_model(Path::new(&a.model))?
    };
    require_file(&a.data)?;
    if !(a.hysteresis_db >= 0.0) {
        return Err(Error::Config(format!("hysteresis_db must be >= 0, got {}", a.hysteresis_db)));
    }
    let threshold = a
        .threshold_db
        .or(file.provenance.as_ref().map(|p| p.label_rule.threshold_db))
        .unwrap_or(LabelRule::default().threshold_db);
    let rule = LabelRule::new(threshold).map_err(|e| Error::Config(e.to_string()))?;
    prepare_dir(&a.out_dir)?;

    let instances = group_instances(&read_csv(&a.data)?, a.n_candidates)?;
    let trace = handover_sim(&file.model, &instances, &rule, a.hysteresis_db)?;
    let mut hits = 0;
    for cs in &instances {
        if select_predicted(&file.model, cs)?.chosen_index == select_oracle(cs) {
            hits += 1;
        }
    }
    let n = instances.len();
    let (lo, hi) = wilson_interval(hits, n, 1.96);
    let summary = SimulationSummary {
        model: &file.name,
        n_steps: n,
        n_candidates: a.n_candidates,
        threshold_db: rule.threshold_db,
        hysteresis_db: a.hysteresis_db,
        switch_count: trace.switch_count,
        outage_fraction: trace.outage_fraction,
        selection_accuracy: hits as f64 / n as f64,
        selection_accuracy_ci95: [lo, hi],
    };

    write_text(&a.out_dir.join("trace.csv"), &trace.to_csv())?;
    write_text(&a.out_dir.join("summary.json"), &to_json(&summary)?)?;
    println!(
        "{}: {} steps, {} switches, outage {:.4}, selection accuracy {:.4} [{:.4}, {:.4}]",
        file.name, n, summary.switch_count, summary.outage_fraction, summary.selection_accuracy, lo, hi
    );
    Ok(())
}
