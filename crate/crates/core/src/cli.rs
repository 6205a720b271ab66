//! Command-line front end: `synth`, `weights` and `run`.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or
//! configuration error. Flags override values read from `--config`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use crate::bench::{format_summary, run_benchmark, run_benchmark_on, EvalReport};
use crate::config::{ExperimentConfig, Invocation, RunManifest, WeightMethod, WeightsSpec};
use crate::data::{Dataset, Domain, Standardizer};
use crate::density_ratio::{domain_weights, fit_domain_discriminator};
use crate::error::Error;
use crate::io::{load_dataset, write_columns, write_dataset, CsvSchema};
use crate::learner::{LearnerKind, Provenance, WeightVector};
use crate::pipeline::{
    hybrid_weights, source_weights, BaselineKind, CombineScale, NegativePolicy, PipelineSettings, WeightSummary,
};
use crate::synth::{synth_shift, ShiftKind, ShiftScenario};
use crate::task_relevance::{fit_union_model, task_weights_for_source};

#[derive(Debug, Parser)]
#[command(
    name = "hybrid-transfer",
    version,
    about = "Instance-weighted transfer learning experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate source, target-train and target-test CSVs with a controlled shift.
    Synth(SynthArgs),
    /// Compute source sample weights for a source/target pair of CSV files.
    Weights(WeightsArgs),
    /// Run a benchmark from an experiment config, or replay a manifest.
    Run(RunArgs),
}

fn kebab<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown value {s:?}"))
}

fn rate(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} must lie strictly between 0 and 1"))
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// TOML experiment config; its [scenario] table supplies defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// mean-shift, covariance-shift, label-ratio-shift or missing-subclass.
    #[arg(long, value_parser = kebab::<ShiftKind>)]
    kind: Option<ShiftKind>,
    /// Feature dimension.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n_source: Option<usize>,
    #[arg(long)]
    n_target_train: Option<usize>,
    #[arg(long)]
    n_target_test: Option<usize>,
    #[arg(long)]
    shift_magnitude: Option<f64>,
    /// Positive rate of both domains.
    #[arg(long, value_parser = rate)]
    positive_rate: Option<f64>,
    #[arg(long, value_parser = rate)]
    positive_rate_source: Option<f64>,
    #[arg(long, value_parser = rate)]
    positive_rate_target: Option<f64>,
    #[arg(long)]
    class_separation: Option<f64>,
    /// Flip every source label.
    #[arg(long)]
    invert_source_labels: bool,
    /// Print the resolved scenario and stop.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Debug, Args)]
struct WeightsArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// discriminative, gaussian, hybrid or ones.
    #[arg(long, value_parser = kebab::<WeightMethod>)]
    method: WeightMethod,
    /// Output directory for weights.csv and the manifest.
    #[arg(long)]
    out: PathBuf,
    /// TOML experiment config supplying learner, hyperparams and hybrid settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    label_column: String,
    /// log-reg or boosted-stumps (union model for task weights).
    #[arg(long, value_parser = kebab::<LearnerKind>)]
    learner: Option<LearnerKind>,
    #[arg(long)]
    clip_max: Option<f64>,
    /// clamp-zero or allow.
    #[arg(long, value_parser = kebab::<NegativePolicy>)]
    negative_policy: Option<NegativePolicy>,
    /// raw-sum or standardized-sum.
    #[arg(long, value_parser = kebab::<CombineScale>)]
    combine_scale: Option<CombineScale>,
    #[arg(long)]
    discriminator_l2: Option<f64>,
    /// Fit the discriminator without class balancing.
    #[arg(long)]
    no_balance: bool,
    #[arg(long)]
    ridge_eps: Option<f64>,
    /// Use raw features instead of standardizing on source and target.
    #[arg(long)]
    no_standardize: bool,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// TOML experiment config.
    #[arg(long, required_unless_present = "manifest", conflicts_with = "manifest")]
    config: Option<PathBuf>,
    /// Replay the run recorded in a manifest and compare outputs.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, conflicts_with = "manifest")]
    seed: Option<u64>,
    #[arg(long, conflicts_with = "manifest")]
    replicates: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    jobs: Option<usize>,
    /// Validate the config and print the plan without training.
    #[arg(long)]
    dry_run: bool,
}

/// A failure and its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: Error) -> Failure {
    Failure::Runtime(e.to_string())
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Entry point for the binary.
pub fn main() -> ExitCode {
    run_cli(std::env::args_os())
}

/// Parses `args` (program name first) and runs the command.
pub fn run_cli<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Weights(a) => cmd_weights(a),
        Command::Run(a) => cmd_run(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn require_out(out: Option<PathBuf>) -> CliResult<PathBuf> {
    out.ok_or_else(|| Failure::Usage("--out is required".into()))
}

fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))
}

/// Names the flag behind a scenario field in validation messages.
fn flag_error(e: Error) -> Failure {
    match e {
        Error::InvalidParameter { name, reason } => {
            Failure::Usage(format!("invalid --{}: {reason}", name.replace('_', "-")))
        }
        other => usage(other),
    }
}

fn cmd_synth(a: SynthArgs) -> CliResult<()> {
    let mut scn = match &a.config {
        Some(p) => ExperimentConfig::load(p).map_err(usage)?.scenario,
        None => ShiftScenario::default(),
    };
    if let Some(v) = a.seed {
        scn.seed = v;
    }
    if let Some(v) = a.kind {
        scn.kind = v;
    }
    if let Some(v) = a.d {
        scn.d = v;
    }
    if let Some(v) = a.n_source {
        scn.n_source = v;
    }
    if let Some(v) = a.n_target_train {
        scn.n_target_train = v;
    }
    if let Some(v) = a.n_target_test {
        scn.n_target_test = v;
    }
    if let Some(v) = a.shift_magnitude {
        scn.shift_magnitude = v;
    }
    if let Some(v) = a.positive_rate {
        scn.positive_rate_source = v;
        scn.positive_rate_target = v;
    }
    if let Some(v) = a.positive_rate_source {
        scn.positive_rate_source = v;
    }
    if let Some(v) = a.positive_rate_target {
        scn.positive_rate_target = v;
    }
    if let Some(v) = a.class_separation {
        scn.class_separation = v;
    }
    if a.invert_source_labels {
        scn.invert_source_labels = true;
    }
    scn.validate().map_err(flag_error)?;
    if a.dry_run {
        println!("{}", serde_json::to_string_pretty(&scn).map_err(|e| runtime(e.into()))?);
        return Ok(());
    }
    let out = require_out(a.out)?;
    let manifest = write_synth(&scn, &out).map_err(runtime)?;
    println!("wrote {} files to {}", manifest.outputs.len() + 1, out.display());
    Ok(())
}

/// Writes the three splits and a manifest into `out`.
pub fn write_synth(scn: &ShiftScenario, out: &Path) -> crate::Result<RunManifest> {
    fs::create_dir_all(out)?;
    let splits = synth_shift(scn)?;
    let mut manifest = RunManifest::new(Invocation::Synth { scenario: scn.clone() }, vec![scn.seed]);
    for (name, ds) in [
        ("source.csv", &splits.source),
        ("target_train.csv", &splits.target_train),
        ("target_test.csv", &splits.target_test),
    ] {
        write_dataset(out.join(name), ds)?;
        manifest.add_output(out, name)?;
    }
    manifest.write(out)?;
    Ok(manifest)
}

fn cmd_weights(a: WeightsArgs) -> CliResult<()> {
    let base = match &a.config {
        Some(p) => ExperimentConfig::load(p).map_err(usage)?,
        None => ExperimentConfig::default(),
    };
    let mut settings = base.bench().settings;
    if let Some(v) = a.learner {
        settings.learner = v;
    }
    if let Some(v) = a.clip_max {
        settings.hybrid.clip_max = v;
    }
    if let Some(v) = a.negative_policy {
        settings.hybrid.negative_policy = v;
    }
    if let Some(v) = a.combine_scale {
        settings.hybrid.combine_scale = v;
    }
    if let Some(v) = a.discriminator_l2 {
        settings.hybrid.discriminator_l2 = v;
    }
    if a.no_balance {
        settings.hybrid.balance = false;
    }
    if let Some(v) = a.ridge_eps {
        settings.ridge_eps = v;
    }
    settings.validate().map_err(flag_error)?;
    let spec = WeightsSpec {
        method: a.method,
        source: a.source,
        target: a.target,
        label_column: a.label_column,
        standardize: base.standardize && !a.no_standardize,
        settings,
    };
    for p in [&spec.source, &spec.target] {
        if !p.exists() {
            return Err(usage(Error::MissingFile(p.clone())));
        }
    }
    let (_, summary) = write_weights(&spec, &a.out).map_err(runtime)?;
    print!("{}", format_weight_summary(&summary));
    Ok(())
}

/// Text block describing a weight vector.
pub fn format_weight_summary(s: &WeightSummary) -> String {
    let mut out = format!(
        "min {}\nmean {}\nmax {}\nfraction_clipped {}\nfraction_clamped {}\nsaturated {}\n",
        s.min, s.mean, s.max, s.fraction_clipped, s.fraction_clamped, s.saturated
    );
    if let Some(f) = s.fraction_negative_task {
        out.push_str(&format!("fraction_negative_task {f}\n"));
    }
    if let Some(id) = &s.union_model_id {
        out.push_str(&format!("union_model {id}\n"));
    }
    out
}

fn load_pair(spec: &WeightsSpec) -> crate::Result<(Dataset, Dataset)> {
    let schema = CsvSchema::with_label(spec.label_column.clone());
    let source = load_dataset(&spec.source, &schema, Domain::Source)?;
    let target = load_dataset(&spec.target, &schema, Domain::Target)?;
    crate::error::check_dim(target.d(), source.d())?;
    if !spec.standardize {
        return Ok((source, target));
    }
    let st = Standardizer::fit(&[&source, &target])?;
    Ok((st.apply(&source)?, st.apply(&target)?))
}

/// Computes the weights described by `spec` and writes `weights.csv` plus a
/// manifest into `out`. Hybrid output has columns `w_domain,w_task,w_final`;
/// every other method a single `weight` column.
pub fn write_weights(spec: &WeightsSpec, out: &Path) -> crate::Result<(RunManifest, WeightSummary)> {
    let (source, target) = load_pair(spec)?;
    fs::create_dir_all(out)?;
    let settings: &PipelineSettings = &spec.settings;
    let name = "weights.csv";
    let path = out.join(name);
    let summary = match spec.method {
        WeightMethod::Ones | WeightMethod::Gaussian => {
            let kind = if spec.method == WeightMethod::Ones {
                BaselineKind::AllOnes
            } else {
                BaselineKind::Gaussian
            };
            let (w, summary) = source_weights(kind, &source, &target, settings)?;
            write_columns(&path, &[("weight", &w.values)])?;
            summary
        }
        WeightMethod::Discriminative => {
            let disc = fit_domain_discriminator(
                &source,
                &target,
                settings.hybrid.discriminator_l2,
                settings.hybrid.balance,
            )?;
            let ratios = domain_weights(&disc, &source)?;
            write_columns(&path, &[("weight", &ratios.values)])?;
            let w = WeightVector::unclipped(ratios.values, Provenance::Custom)?;
            WeightSummary::of(&w, 0, 0, ratios.saturated)
        }
        WeightMethod::Hybrid => {
            let cfg = &settings.hybrid;
            let disc = fit_domain_discriminator(&source, &target, cfg.discriminator_l2, cfg.balance)?;
            let domain = domain_weights(&disc, &source)?;
            let union = fit_union_model(&source, &target, &settings.hyperparams, settings.learner)?;
            let task = task_weights_for_source(&union, &source)?;
            let hw = hybrid_weights(&domain.values, &task.weights, cfg)?;
            write_columns(
                &path,
                &[
                    ("w_domain", &domain.values),
                    ("w_task", &task.weights),
                    ("w_final", &hw.weights.values),
                ],
            )?;
            let mut summary = WeightSummary::of(&hw.weights, hw.clipped, hw.clamped, domain.saturated);
            summary.fraction_negative_task = Some(task.fraction_negative);
            summary.union_model_id = Some(task.union_model_id);
            summary.margin_kind = Some(task.margin_kind);
            summary.combine_scale = Some(cfg.combine_scale);
            summary.negative_policy = Some(cfg.negative_policy);
            summary
        }
    };
    let mut manifest = RunManifest::new(
        Invocation::Weights { spec: spec.clone() },
        vec![settings.hyperparams.seed],
    );
    manifest.add_input(&spec.source)?;
    manifest.add_input(&spec.target)?;
    manifest.add_output(out, name)?;
    manifest.write(out)?;
    Ok((manifest, summary))
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn cmd_run(a: RunArgs) -> CliResult<()> {
    let jobs = a.jobs.unwrap_or_else(default_jobs);
    if jobs == 0 {
        return Err(Failure::Usage("invalid --jobs: must be at least 1".into()));
    }
    if let Some(path) = &a.manifest {
        let manifest = RunManifest::load(path).map_err(usage)?;
        if a.dry_run {
            println!(
                "{}",
                serde_json::to_string_pretty(&manifest.invocation).map_err(|e| runtime(e.into()))?
            );
            return Ok(());
        }
        let out = require_out(a.out)?;
        return replay(&manifest, &out, jobs);
    }
    let path = a.config.expect("clap requires --config without --manifest");
    let mut cfg = ExperimentConfig::load(&path).map_err(usage)?;
    if let Some(v) = a.seed {
        cfg.seed = v;
    }
    if let Some(v) = a.replicates {
        cfg.replicates = v;
    }
    cfg.validate().map_err(usage)?;
    if let Some(data) = &cfg.data {
        for p in data.paths() {
            if !p.exists() {
                return Err(usage(Error::MissingFile(p.to_path_buf())));
            }
        }
    }
    if a.dry_run {
        print!("{}", format_plan(&cfg).map_err(runtime)?);
        return Ok(());
    }
    let out = require_out(a.out)?;
    create_dir(&out)?;
    let (_, report) = write_run(&cfg, &out, jobs).map_err(runtime)?;
    print!("{}", format_summary(&report));
    if report.any_failures() {
        return Err(Failure::Runtime(format!(
            "some baselines failed; partial report saved in {}",
            out.display()
        )));
    }
    Ok(())
}

/// Human-readable description of what a run would do.
pub fn format_plan(cfg: &ExperimentConfig) -> crate::Result<String> {
    let mut out = String::from("# resolved config\n");
    out.push_str(&cfg.to_toml()?);
    out.push_str("\n# plan\n");
    match &cfg.data {
        Some(d) => out.push_str(&format!(
            "data: {}, {}, {}\n",
            d.source.display(),
            d.target_train.display(),
            d.target_test.display()
        )),
        None => out.push_str(&format!("data: synthetic {:?}\n", cfg.scenario.kind)),
    }
    let names: Vec<&str> = cfg.baselines.iter().map(|b| b.as_str()).collect();
    out.push_str(&format!(
        "replicates: {}\nbaselines: {}\n",
        cfg.replicates,
        names.join(", ")
    ));
    out.push_str(&format!("seeds: {:?}\n", cfg.seeds()));
    Ok(out)
}

/// Runs a benchmark and writes `report.json`, `summary.txt`, the sweep
/// CSVs and a manifest into `out`. A report with failed baselines is
/// still written.
pub fn write_run(cfg: &ExperimentConfig, out: &Path, jobs: usize) -> crate::Result<(RunManifest, EvalReport)> {
    cfg.validate()?;
    fs::create_dir_all(out)?;
    let bench = cfg.bench();
    let mut manifest = RunManifest::new(
        Invocation::Run {
            config: Box::new(cfg.clone()),
        },
        cfg.seeds(),
    );
    let report = match &cfg.data {
        Some(data) => {
            for p in data.paths() {
                manifest.add_input(p)?;
            }
            run_benchmark_on(&data.load()?, &bench, jobs)?
        }
        None => run_benchmark(&cfg.scenario, &bench, jobs)?,
    };
    fs::write(out.join("report.json"), report.to_json()? + "\n")?;
    manifest.add_output(out, "report.json")?;
    fs::write(out.join("summary.txt"), format_summary(&report))?;
    manifest.add_output(out, "summary.txt")?;
    for p in report.write_sweep_csvs(out)? {
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        manifest.add_output(out, &name)?;
    }
    manifest.write(out)?;
    Ok((manifest, report))
}

/// Re-executes a manifest into `out` and checks every output digest.
pub fn replay(manifest: &RunManifest, out: &Path, jobs: usize) -> CliResult<()> {
    let changed = manifest.changed_inputs().map_err(runtime)?;
    if !changed.is_empty() {
        let list: Vec<String> = changed.iter().map(|p| p.display().to_string()).collect();
        return Err(Failure::Usage(format!(
            "inputs changed since the run: {}",
            list.join(", ")
        )));
    }
    create_dir(out)?;
    let again = match &manifest.invocation {
        Invocation::Synth { scenario } => write_synth(scenario, out),
        Invocation::Weights { spec } => write_weights(spec, out).map(|(m, _)| m),
        Invocation::Run { config } => write_run(config, out, jobs).map(|(m, _)| m),
    }
    .map_err(runtime)?;
    let mismatched: Vec<String> = manifest
        .outputs
        .iter()
        .filter(|o| !again.outputs.contains(o))
        .map(|o| o.path.display().to_string())
        .collect();
    if !mismatched.is_empty() {
        return Err(Failure::Runtime(format!("outputs differ: {}", mismatched.join(", "))));
    }
    println!("reproduced {} outputs bit-exactly", manifest.outputs.len());
    Ok(())
}
