//! Multi-seed benchmark harness.
//!
//! Every replicate draws a fresh synthetic split (or reuses file data),
//! standardizes on source plus target training rows, then trains and scores
//! each requested baseline on the held-out target test set. Replicates run in
//! parallel and are collected in index order, so the report does not depend
//! on the thread count.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Standardizer;
use crate::error::{Error, Result};
use crate::metrics::{evaluate, mean_sd, sign_test, Metrics, SignTest};
use crate::pipeline::{
    argmax_alpha, build_baseline, select_alpha, source_weights, train_with_weights, AlphaSelection, BaselineKind,
    PipelineSettings, SweepPoint, WeightSummary,
};
use crate::rng::derive_seed;
use crate::synth::{synth_shift, ShiftScenario, ShiftSplits};

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    /// Cross-validated on the target training set.
    Cv,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlphaConfig {
    pub mode: AlphaMode,
    /// Used when `mode = fixed`.
    pub value: f64,
    pub grid: Vec<f64>,
    pub folds: usize,
}

/// `{0.0, 0.1, ..., 1.0}` without accumulated rounding.
pub fn tenths_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

impl Default for AlphaConfig {
    fn default() -> Self {
        Self {
            mode: AlphaMode::Cv,
            value: 0.8,
            grid: tenths_grid(),
            folds: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub enabled: bool,
    pub grid: Vec<f64>,
    /// Weighted baselines to sweep; others are ignored.
    pub baselines: Vec<BaselineKind>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            grid: tenths_grid(),
            baselines: vec![BaselineKind::AllOnes, BaselineKind::Gaussian, BaselineKind::Hybrid],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub replicates: usize,
    pub baselines: Vec<BaselineKind>,
    pub standardize: bool,
    pub settings: PipelineSettings,
    pub alpha: AlphaConfig,
    pub sweep: SweepConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            replicates: 20,
            baselines: BaselineKind::ALL.to_vec(),
            standardize: true,
            settings: PipelineSettings::default(),
            alpha: AlphaConfig::default(),
            sweep: SweepConfig::default(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::param("replicates", "must be at least 1"));
        }
        if self.baselines.is_empty() {
            return Err(Error::param("baselines", "list is empty"));
        }
        for (i, b) in self.baselines.iter().enumerate() {
            if self.baselines[..i].contains(b) {
                return Err(Error::param("baselines", format!("{b} listed twice")));
            }
        }
        self.settings.validate()?;
        let a = &self.alpha;
        if a.grid.is_empty() || a.grid.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::param(
                "alpha.grid",
                "must be a nonempty list of values in [0, 1]",
            ));
        }
        if !(0.0..=1.0).contains(&a.value) {
            return Err(Error::param("alpha.value", "must lie in [0, 1]"));
        }
        if a.mode == AlphaMode::Cv && a.grid.len() > 1 && a.folds < 2 {
            return Err(Error::param("alpha.folds", "need at least 2 folds"));
        }
        if self.sweep.enabled {
            let g = &self.sweep.grid;
            if g.is_empty() || g.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::param(
                    "sweep.grid",
                    "must be a nonempty list of values in [0, 1]",
                ));
            }
            if g.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::param("sweep.grid", "must be strictly ascending"));
            }
            if let Some(b) = self.sweep.baselines.iter().find(|b| !b.is_weighted()) {
                return Err(Error::param("sweep.baselines", format!("{b} has no alpha")));
            }
        }
        Ok(())
    }

    /// Seed for the data of replicate `i`.
    pub fn data_seed(&self, i: usize) -> u64 {
        derive_seed(self.seed, "synth", i as u64)
    }

    /// Seed for fold shuffling in replicate `i`.
    pub fn fold_seed(&self, i: usize) -> u64 {
        derive_seed(self.seed, "folds", i as u64)
    }
}

/// Labels packed as a string of `0`/`1` characters.
pub fn pack_labels(labels: &[u8]) -> String {
    labels.iter().map(|&l| if l == 1 { '1' } else { '0' }).collect()
}

pub fn unpack_labels(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidSample(format!("bad label character {other:?}"))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRun {
    pub kind: BaselineKind,
    pub alpha: Option<f64>,
    pub alpha_selection: Option<AlphaSelection>,
    pub metrics: Option<Metrics>,
    pub predictions: Option<String>,
    pub weights: Option<WeightSummary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub kind: BaselineKind,
    pub points: Vec<SweepPoint>,
    pub best_alpha: f64,
    /// Best interior macro-F1 strictly above both endpoints.
    pub interior_peak: bool,
}

impl SweepCurve {
    pub fn new(kind: BaselineKind, points: Vec<SweepPoint>) -> Self {
        let alphas: Vec<f64> = points.iter().map(|p| p.alpha).collect();
        let scores: Vec<f64> = points.iter().map(|p| p.metrics.macro_f1).collect();
        let best_alpha = alphas[argmax_alpha(&alphas, &scores)];
        let interior_peak = scores.len() > 2 && {
            let inner = scores[1..scores.len() - 1]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            inner > scores[0] && inner > scores[scores.len() - 1]
        };
        Self {
            kind,
            points,
            best_alpha,
            interior_peak,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub index: usize,
    pub data_seed: u64,
    pub fold_seed: u64,
    pub truth: String,
    pub baselines: Vec<BaselineRun>,
    pub sweeps: Vec<SweepCurve>,
}

impl ReplicateResult {
    pub fn run(&self, kind: BaselineKind) -> Option<&BaselineRun> {
        self.baselines.iter().find(|b| b.kind == kind)
    }

    pub fn sweep(&self, kind: BaselineKind) -> Option<&SweepCurve> {
        self.sweeps.iter().find(|s| s.kind == kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    fn of(xs: &[f64]) -> Self {
        let (mean, sd) = mean_sd(xs);
        Self { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub kind: BaselineKind,
    pub succeeded: usize,
    pub failed: usize,
    pub precision: MeanSd,
    pub recall: MeanSd,
    pub macro_f1: MeanSd,
    pub accuracy: MeanSd,
    pub alpha: Option<MeanSd>,
}

/// Paired comparison of Hybrid against one other baseline on macro-F1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub other: BaselineKind,
    pub test: SignTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub kind: BaselineKind,
    pub alphas: Vec<f64>,
    pub mean_macro_f1: Vec<f64>,
    pub interior_peaks: usize,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub tool_version: String,
    pub scenario: Option<ShiftScenario>,
    pub config: BenchConfig,
    pub replicates: Vec<ReplicateResult>,
    pub summary: Vec<BaselineSummary>,
    pub comparisons: Vec<Comparison>,
    pub sweeps: Vec<SweepSummary>,
}

impl EvalReport {
    pub fn summary_for(&self, kind: BaselineKind) -> Option<&BaselineSummary> {
        self.summary.iter().find(|s| s.kind == kind)
    }

    /// Per-replicate macro-F1 of one baseline (failed runs skipped).
    pub fn macro_f1(&self, kind: BaselineKind) -> Vec<f64> {
        self.replicates
            .iter()
            .filter_map(|r| r.run(kind)?.metrics.map(|m| m.macro_f1))
            .collect()
    }

    pub fn comparison(&self, other: BaselineKind) -> Option<&SignTest> {
        self.comparisons.iter().find(|c| c.other == other).map(|c| &c.test)
    }

    pub fn any_failures(&self) -> bool {
        self.summary.iter().any(|s| s.failed > 0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(s)?;
        if report.format_version != REPORT_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "report format version {} is not supported",
                report.format_version
            )));
        }
        Ok(report)
    }

    /// Checks that every stored metric follows from the stored predictions.
    pub fn verify(&self) -> Result<()> {
        for rep in &self.replicates {
            let truth = unpack_labels(&rep.truth)?;
            for run in &rep.baselines {
                if let (Some(m), Some(p)) = (&run.metrics, &run.predictions) {
                    let again = Metrics::from_labels(&truth, &unpack_labels(p)?)?;
                    if &again != m {
                        return Err(Error::InvalidSample(format!(
                            "replicate {}: {} metrics do not match predictions",
                            rep.index, run.kind
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// One CSV per swept baseline, columns
    /// `replicate,alpha,precision,recall,macro_f1,accuracy`, plus a
    /// seed-averaged `alpha,precision,recall,macro_f1,accuracy` file.
    pub fn write_sweep_csvs(&self, dir: impl AsRef<Path>) -> Result<Vec<std::path::PathBuf>> {
        let mut written = Vec::new();
        for s in &self.sweeps {
            let path = dir.as_ref().join(format!("sweep-{}.csv", s.kind));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["alpha", "precision", "recall", "macro_f1", "accuracy"])?;
            for (g, alpha) in s.alphas.iter().enumerate() {
                let pts: Vec<Metrics> = self
                    .replicates
                    .iter()
                    .filter_map(|r| r.sweep(s.kind).map(|c| c.points[g].metrics))
                    .collect();
                let avg = |f: fn(&Metrics) -> f64| mean_sd(&pts.iter().map(f).collect::<Vec<_>>()).0;
                w.write_record([
                    alpha.to_string(),
                    avg(|m| m.precision).to_string(),
                    avg(|m| m.recall).to_string(),
                    avg(|m| m.macro_f1).to_string(),
                    avg(|m| m.accuracy).to_string(),
                ])?;
            }
            w.flush()?;
            written.push(path);

            let path = dir.as_ref().join(format!("sweep-{}-replicates.csv", s.kind));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["replicate", "alpha", "precision", "recall", "macro_f1", "accuracy"])?;
            for r in &self.replicates {
                if let Some(c) = r.sweep(s.kind) {
                    for p in &c.points {
                        let m = &p.metrics;
                        w.write_record([
                            r.index.to_string(),
                            p.alpha.to_string(),
                            m.precision.to_string(),
                            m.recall.to_string(),
                            m.macro_f1.to_string(),
                            m.accuracy.to_string(),
                        ])?;
                    }
                }
            }
            w.flush()?;
            written.push(path);
        }
        Ok(written)
    }
}

fn run_one(
    kind: BaselineKind,
    splits: &ShiftSplits,
    cfg: &BenchConfig,
    settings: &PipelineSettings,
) -> Result<(BaselineRun, Option<SweepCurve>)> {
    let ShiftSplits {
        source,
        target_train,
        target_test,
    } = splits;
    if !kind.is_weighted() {
        let fit = build_baseline(kind, source, target_train, settings)?;
        let predicted = fit.model.predict_labels(target_test)?;
        return Ok((
            BaselineRun {
                kind,
                alpha: None,
                alpha_selection: None,
                metrics: Some(Metrics::from_labels(target_test.labels(), &predicted)?),
                predictions: Some(pack_labels(&predicted)),
                weights: None,
                error: None,
            },
            None,
        ));
    }

    let (w, summary) = source_weights(kind, source, target_train, settings)?;
    let (alpha, selection) = match cfg.alpha.mode {
        AlphaMode::Fixed => (cfg.alpha.value, None),
        AlphaMode::Cv => {
            let sel = select_alpha(kind, source, target_train, &cfg.alpha.grid, cfg.alpha.folds, settings)?;
            (sel.alpha, Some(sel))
        }
    };
    let model = train_with_weights(source, target_train, &w, alpha, settings)?;
    let predicted = model.predict_labels(target_test)?;
    let run = BaselineRun {
        kind,
        alpha: Some(alpha),
        alpha_selection: selection,
        metrics: Some(Metrics::from_labels(target_test.labels(), &predicted)?),
        predictions: Some(pack_labels(&predicted)),
        weights: Some(summary),
        error: None,
    };
    let sweep = if cfg.sweep.enabled && cfg.sweep.baselines.contains(&kind) {
        let points = cfg
            .sweep
            .grid
            .par_iter()
            .map(|&a| {
                let m = train_with_weights(source, target_train, &w, a, settings)?;
                Ok(SweepPoint {
                    alpha: a,
                    metrics: evaluate(&m, target_test)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Some(SweepCurve::new(kind, points))
    } else {
        None
    };
    Ok((run, sweep))
}

fn standardize(splits: ShiftSplits) -> Result<ShiftSplits> {
    let s = Standardizer::fit(&[&splits.source, &splits.target_train])?;
    Ok(ShiftSplits {
        source: s.apply(&splits.source)?,
        target_train: s.apply(&splits.target_train)?,
        target_test: s.apply(&splits.target_test)?,
    })
}

/// Runs every configured baseline on one set of splits.
pub fn run_replicate(index: usize, splits: ShiftSplits, data_seed: u64, cfg: &BenchConfig) -> Result<ReplicateResult> {
    let splits = if cfg.standardize { standardize(splits)? } else { splits };
    let fold_seed = cfg.fold_seed(index);
    let mut settings = cfg.settings.clone();
    settings.hyperparams.seed = fold_seed;
    let outcomes: Vec<(BaselineRun, Option<SweepCurve>)> = cfg
        .baselines
        .par_iter()
        .map(|&kind| {
            run_one(kind, &splits, cfg, &settings).unwrap_or_else(|e| {
                (
                    BaselineRun {
                        kind,
                        alpha: None,
                        alpha_selection: None,
                        metrics: None,
                        predictions: None,
                        weights: None,
                        error: Some(e.to_string()),
                    },
                    None,
                )
            })
        })
        .collect();
    let (baselines, sweeps): (Vec<_>, Vec<_>) = outcomes.into_iter().unzip();
    Ok(ReplicateResult {
        index,
        data_seed,
        fold_seed,
        truth: pack_labels(splits.target_test.labels()),
        baselines,
        sweeps: sweeps.into_iter().flatten().collect(),
    })
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Synthetic benchmark; replicate `i` regenerates the scenario with
/// `cfg.data_seed(i)`. `jobs` caps the worker threads.
pub fn run_benchmark(scn: &ShiftScenario, cfg: &BenchConfig, jobs: usize) -> Result<EvalReport> {
    scn.validate()?;
    cfg.validate()?;
    let replicates = with_pool(jobs, || {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|i| {
                let seed = cfg.data_seed(i);
                let splits = synth_shift(&scn.with_seed(seed))?;
                run_replicate(i, splits, seed, cfg)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(assemble(Some(scn.with_seed(cfg.seed)), cfg, replicates))
}

/// Benchmark on fixed data; replicates differ only in fold shuffling.
pub fn run_benchmark_on(splits: &ShiftSplits, cfg: &BenchConfig, jobs: usize) -> Result<EvalReport> {
    cfg.validate()?;
    let d = splits.target_train.d();
    crate::error::check_dim(d, splits.source.d())?;
    crate::error::check_dim(d, splits.target_test.d())?;
    let replicates = with_pool(jobs, || {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|i| run_replicate(i, splits.clone(), cfg.seed, cfg))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(assemble(None, cfg, replicates))
}

fn assemble(scenario: Option<ShiftScenario>, cfg: &BenchConfig, replicates: Vec<ReplicateResult>) -> EvalReport {
    let summary = cfg
        .baselines
        .iter()
        .map(|&kind| {
            let runs: Vec<&BaselineRun> = replicates.iter().filter_map(|r| r.run(kind)).collect();
            let ok: Vec<Metrics> = runs.iter().filter_map(|r| r.metrics).collect();
            let col = |f: fn(&Metrics) -> f64| MeanSd::of(&ok.iter().map(f).collect::<Vec<_>>());
            let alphas: Vec<f64> = runs.iter().filter_map(|r| r.alpha).collect();
            BaselineSummary {
                kind,
                succeeded: ok.len(),
                failed: runs.len() - ok.len(),
                precision: col(|m| m.precision),
                recall: col(|m| m.recall),
                macro_f1: col(|m| m.macro_f1),
                accuracy: col(|m| m.accuracy),
                alpha: (!alphas.is_empty()).then(|| MeanSd::of(&alphas)),
            }
        })
        .collect();

    let mut comparisons = Vec::new();
    if cfg.baselines.contains(&BaselineKind::Hybrid) {
        for &other in cfg.baselines.iter().filter(|&&b| b != BaselineKind::Hybrid) {
            let (a, b): (Vec<f64>, Vec<f64>) = replicates
                .iter()
                .filter_map(|r| {
                    let h = r.run(BaselineKind::Hybrid)?.metrics?;
                    let o = r.run(other)?.metrics?;
                    Some((h.macro_f1, o.macro_f1))
                })
                .unzip();
            comparisons.push(Comparison {
                other,
                test: sign_test(&a, &b),
            });
        }
    }

    let mut sweeps = Vec::new();
    if cfg.sweep.enabled {
        for &kind in cfg.baselines.iter().filter(|b| cfg.sweep.baselines.contains(b)) {
            let curves: Vec<&SweepCurve> = replicates.iter().filter_map(|r| r.sweep(kind)).collect();
            if curves.is_empty() {
                continue;
            }
            let mean_macro_f1 = (0..cfg.sweep.grid.len())
                .map(|g| mean_sd(&curves.iter().map(|c| c.points[g].metrics.macro_f1).collect::<Vec<_>>()).0)
                .collect();
            sweeps.push(SweepSummary {
                kind,
                alphas: cfg.sweep.grid.clone(),
                mean_macro_f1,
                interior_peaks: curves.iter().filter(|c| c.interior_peak).count(),
                replicates: curves.len(),
            });
        }
    }

    EvalReport {
        format_version: REPORT_FORMAT_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        scenario,
        config: cfg.clone(),
        replicates,
        summary,
        comparisons,
        sweeps,
    }
}

/// Plain-text table of mean ± sd per baseline.
pub fn format_summary(report: &EvalReport) -> String {
    let mut out = format!(
        "{:<12} {:>6} {:>17} {:>17} {:>17} {:>17}\n",
        "baseline", "ok", "precision", "recall", "macro-F1", "accuracy"
    );
    for s in &report.summary {
        let cell = |m: MeanSd| format!("{:.4} ± {:.4}", m.mean, m.sd);
        out.push_str(&format!(
            "{:<12} {:>6} {:>17} {:>17} {:>17} {:>17}\n",
            s.kind.as_str(),
            format!("{}/{}", s.succeeded, s.succeeded + s.failed),
            cell(s.precision),
            cell(s.recall),
            cell(s.macro_f1),
            cell(s.accuracy)
        ));
    }
    for c in &report.comparisons {
        out.push_str(&format!(
            "hybrid vs {:<12} wins {:>2} losses {:>2} ties {:>2} p = {:.4}\n",
            c.other.as_str(),
            c.test.wins,
            c.test.losses,
            c.test.ties,
            c.test.p_value
        ));
    }
    for s in &report.sweeps {
        out.push_str(&format!(
            "sweep {:<12} interior peak in {}/{} replicates\n",
            s.kind.as_str(),
            s.interior_peaks,
            s.replicates
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (ShiftScenario, BenchConfig) {
        let scn = ShiftScenario {
            n_source: 300,
            n_target_train: 60,
            n_target_test: 200,
            positive_rate_source: 0.2,
            positive_rate_target: 0.2,
            ..Default::default()
        };
        let mut cfg = BenchConfig {
            replicates: 2,
            ..Default::default()
        };
        cfg.settings.hyperparams.boosting_rounds = 10;
        cfg.alpha.grid = vec![0.5, 0.9];
        cfg.alpha.folds = 3;
        cfg.sweep.grid = vec![0.0, 0.5, 1.0];
        (scn, cfg)
    }

    #[test]
    fn single_baseline_single_row() {
        let (scn, mut cfg) = small();
        cfg.baselines = vec![BaselineKind::TargetOnly];
        cfg.replicates = 1;
        let r = run_benchmark(&scn, &cfg, 1).unwrap();
        assert_eq!(r.summary.len(), 1);
        assert_eq!(r.replicates[0].baselines.len(), 1);
        assert!(r.comparisons.is_empty() && r.sweeps.is_empty());
    }

    #[test]
    fn report_is_recomputable_and_round_trips() {
        let (scn, cfg) = small();
        let r = run_benchmark(&scn, &cfg, 2).unwrap();
        r.verify().unwrap();
        assert_eq!(EvalReport::from_json(&r.to_json().unwrap()).unwrap(), r);
        assert_eq!(r.sweeps.len(), 3);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let (scn, cfg) = small();
        let one = run_benchmark(&scn, &cfg, 1).unwrap();
        let four = run_benchmark(&scn, &cfg, 4).unwrap();
        assert_eq!(one.to_json().unwrap(), four.to_json().unwrap());
    }

    #[test]
    fn interior_peak_is_strict() {
        let pt = |a: f64, f: f64| SweepPoint {
            alpha: a,
            metrics: Metrics {
                macro_f1: f,
                ..Metrics::from_confusion(Default::default())
            },
        };
        assert!(SweepCurve::new(BaselineKind::Hybrid, vec![pt(0.0, 0.1), pt(0.5, 0.3), pt(1.0, 0.2)]).interior_peak);
        assert!(!SweepCurve::new(BaselineKind::Hybrid, vec![pt(0.0, 0.1), pt(0.5, 0.3), pt(1.0, 0.3)]).interior_peak);
    }

    #[test]
    fn label_packing() {
        assert_eq!(unpack_labels(&pack_labels(&[0, 1, 1, 0])).unwrap(), vec![0, 1, 1, 0]);
        assert!(unpack_labels("01x").is_err());
    }
}
