//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hybrid_transfer::bench::{run_benchmark, BenchConfig, SweepCurve};
use hybrid_transfer::cli::{replay, write_run, write_synth};
use hybrid_transfer::config::{ExperimentConfig, RunManifest};
use hybrid_transfer::density_ratio::{
    domain_weight, fit_domain_discriminator, fit_gaussian_model, gaussian_weight, GaussianDomainModel,
};
use hybrid_transfer::learner::{train, train_weighted, LogisticObjective, Provenance, WeightedSet};
use hybrid_transfer::metrics::{Confusion, Metrics};
use hybrid_transfer::optim::Objective;
use hybrid_transfer::pipeline::{alpha_sweep, build_baseline, train_with_weights};
use hybrid_transfer::rng::stream;
use hybrid_transfer::task_relevance::{fit_union_model, union_alpha};
use hybrid_transfer::{
    synth_shift, BaselineKind, Dataset, Domain, Hyperparams, LearnerKind, PipelineSettings, Sample, ShiftKind,
    ShiftScenario, Standardizer, WeightVector,
};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within_time(start: Instant, limit: Duration, detail: String) -> Check {
    let took = start.elapsed();
    ensure(
        took <= limit,
        format!("{detail}; {:.1}s of {}s", took.as_secs_f64(), limit.as_secs()),
    )
}

fn standardized(scn: &ShiftScenario) -> (Dataset, Dataset, Dataset) {
    let s = synth_shift(scn).unwrap();
    let st = Standardizer::fit(&[&s.source, &s.target_train]).unwrap();
    (
        st.apply(&s.source).unwrap(),
        st.apply(&s.target_train).unwrap(),
        st.apply(&s.target_test).unwrap(),
    )
}

fn endpoint_identities() -> Check {
    let start = Instant::now();
    let scn = ShiftScenario {
        n_source: 1000,
        n_target_test: 500,
        positive_rate_source: 0.1,
        positive_rate_target: 0.1,
        ..ShiftScenario::default()
    };
    let (source, target, test) = standardized(&scn);
    let mut checked = 0;
    for learner in [LearnerKind::LogReg, LearnerKind::BoostedStumps] {
        let mut settings = PipelineSettings {
            learner,
            ..PipelineSettings::default()
        };
        settings.hyperparams.boosting_rounds = 100;
        let hp = &settings.hyperparams;

        let a = union_alpha(target.n(), source.n());
        let ones = train_with_weights(&source, &target, &WeightVector::ones(source.n()), a, &settings).unwrap();
        let union = fit_union_model(&source, &target, hp, learner).unwrap();
        if ones != union {
            return Err(format!("{learner:?}: all-ones at the union alpha differs from union"));
        }

        let fit = build_baseline(BaselineKind::Hybrid, &source, &target, &settings).unwrap();
        let (w, _) = fit.weights.unwrap();
        let hybrid = train_with_weights(&source, &target, &w, 1.0, &settings).unwrap();
        let target_only = build_baseline(BaselineKind::TargetOnly, &source, &target, &settings)
            .unwrap()
            .model;
        if hybrid.params != target_only.params {
            return Err(format!("{learner:?}: hybrid at alpha 1 differs from target-only"));
        }
        let (p, q) = (
            hybrid.predict_scores(&test).unwrap(),
            target_only.predict_scores(&test).unwrap(),
        );
        if p.iter().zip(&q).any(|(a, b)| a.to_bits() != b.to_bits()) {
            return Err(format!("{learner:?}: test scores differ"));
        }
        checked += 1;
    }
    within_time(
        start,
        Duration::from_secs(10),
        format!("{checked} learners bit-identical"),
    )
}

fn discriminator_recovery() -> Check {
    let start = Instant::now();
    let mut rng = stream(2024, "acceptance-discriminator", 0);
    let n = 5000;
    let mut draw = |shift: f64| -> Vec<Sample> {
        (0..n)
            .map(|_| Sample::new(vec![rng.sample::<f64, _>(StandardNormal) + shift], 0))
            .collect()
    };
    let source = Dataset::from_samples(Domain::Source, draw(0.0)).unwrap();
    let target = Dataset::from_samples(Domain::Target, draw(1.0)).unwrap();
    let disc = fit_domain_discriminator(&source, &target, 1e-4, true).unwrap();
    let (slope, intercept) = (disc.w_lr[0], disc.c_lr);
    let mut worst: f64 = 0.0;
    for x in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        let w = domain_weight(&disc, &[x]).unwrap().value;
        worst = worst.max((w / (x - 0.5f64).exp() - 1.0).abs());
    }
    let ok = worst <= 0.2 && (slope + 1.0).abs() <= 0.15 && (intercept - 0.5).abs() <= 0.15;
    if !ok {
        return Err(format!(
            "slope {slope:.4}, intercept {intercept:.4}, worst weight error {:.1}%",
            worst * 100.0
        ));
    }
    within_time(
        start,
        Duration::from_secs(30),
        format!(
            "slope {slope:.4}, intercept {intercept:.4}, worst weight error {:.1}%",
            worst * 100.0
        ),
    )
}

/// Log density of a 2-D normal from the explicit 2x2 inverse.
fn log_normal2(x: [f64; 2], mu: [f64; 2], s: [[f64; 2]; 2]) -> f64 {
    let det = s[0][0] * s[1][1] - s[0][1] * s[1][0];
    let (a, b) = (x[0] - mu[0], x[1] - mu[1]);
    let q = (s[1][1] * a * a - 2.0 * s[0][1] * a * b + s[0][0] * b * b) / det;
    -0.5 * q - 0.5 * det.ln() - (2.0 * std::f64::consts::PI).ln()
}

fn gaussian_ratios() -> Check {
    let (mu_t, s_t) = ([0.5, -1.0], [[2.0, 0.3], [0.3, 0.5]]);
    let (mu_s, s_s) = ([0.0, 0.0], [[1.0, -0.2], [-0.2, 1.5]]);
    let mat = |s: [[f64; 2]; 2]| DMatrix::from_row_slice(2, 2, &[s[0][0], s[0][1], s[1][0], s[1][1]]);
    let model = GaussianDomainModel::from_moments(mu_t.to_vec(), mat(s_t), mu_s.to_vec(), mat(s_s)).unwrap();
    let mut worst: f64 = 0.0;
    for x in [[0.0, 0.0], [1.0, -1.0], [-2.0, 0.5], [0.3, 2.0], [3.0, -2.5]] {
        let expected = (log_normal2(x, mu_t, s_t) - log_normal2(x, mu_s, s_s)).exp();
        let got = gaussian_weight(&model, &x).unwrap().value;
        worst = worst.max((got - expected).abs() / expected);
    }
    if worst >= 1e-9 {
        return Err(format!("relative error {worst:.2e}"));
    }
    let same = GaussianDomainModel::from_moments(mu_s.to_vec(), mat(s_s), mu_s.to_vec(), mat(s_s)).unwrap();
    let ds = synth_shift(&ShiftScenario {
        d: 3,
        n_source: 200,
        ..ShiftScenario::default()
    })
    .unwrap()
    .source;
    let fitted = fit_gaussian_model(&ds, &ds.with_domain(Domain::Target), 1e-3).unwrap();
    let mut ones = true;
    for x in [[0.0, 0.0], [4.0, -3.0], [-1.5, 0.25]] {
        ones &= gaussian_weight(&same, &x).unwrap().value == 1.0;
    }
    for row in ds.rows() {
        ones &= gaussian_weight(&fitted, row).unwrap().value == 1.0;
    }
    ensure(
        ones,
        format!("relative error {worst:.2e}; identical distributions give exactly 1: {ones}"),
    )
}

fn random_dataset(rng: &mut impl Rng, domain: Domain, n: usize, d: usize) -> Dataset {
    let samples = (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let y = u8::from(x[0] + 0.5 * rng.sample::<f64, _>(StandardNormal) > 0.0);
            Sample::new(x, y)
        })
        .collect();
    Dataset::from_samples(domain, samples).unwrap()
}

fn gradient_check() -> Check {
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let mut rng = stream(77, "acceptance-gradient", k);
        let d = rng.random_range(1..6);
        let (nt, ns) = (rng.random_range(5..40), rng.random_range(5..80));
        let target = random_dataset(&mut rng, Domain::Target, nt, d);
        let source = random_dataset(&mut rng, Domain::Source, ns, d);
        let w: Vec<f64> = (0..source.n()).map(|_| rng.random_range(0.0..10.0)).collect();
        let alpha = rng.random_range(0.05..0.95);
        let l2 = 10f64.powf(rng.random_range(-4.0..0.0));
        let set = WeightedSet::blend(&target, &source, &w, alpha).unwrap();
        let obj = LogisticObjective::new(&set, l2);
        let params: Vec<f64> = (0..=d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let mut grad = vec![0.0; d + 1];
        obj.value_grad(&params, &mut grad);
        for j in 0..=d {
            let h = 1e-5 * params[j].abs().max(1.0);
            let (mut up, mut down) = (params.clone(), params.clone());
            up[j] += h;
            down[j] -= h;
            let fd = (obj.value(&up) - obj.value(&down)) / (2.0 * h);
            let rel = (grad[j] - fd).abs() / grad[j].abs().max(fd.abs()).max(1e-3);
            worst = worst.max(rel);
        }
    }
    ensure(
        worst < 1e-6,
        format!("worst relative error {worst:.2e} over 10 configurations"),
    )
}

fn replication_equivalence() -> Check {
    let mut rng = stream(5, "acceptance-replication", 0);
    let target = random_dataset(&mut rng, Domain::Target, 60, 2);
    let source = random_dataset(&mut rng, Domain::Source, 90, 2);
    let counts: Vec<usize> = (0..source.n()).map(|_| rng.random_range(0..4)).collect();
    let w = WeightVector::unclipped(counts.iter().map(|&c| c as f64).collect(), Provenance::Custom).unwrap();
    let hp = Hyperparams {
        boosting_rounds: 50,
        alpha: union_alpha(target.n(), source.n()),
        ..Hyperparams::default()
    };
    let weighted = train_weighted(LearnerKind::BoostedStumps, &target, &source, &w, &hp).unwrap();
    let mut rows: Vec<Sample> = (0..target.n()).map(|i| target.sample(i)).collect();
    for (j, &c) in counts.iter().enumerate() {
        rows.extend(std::iter::repeat_n(source.sample(j), c));
    }
    let replicated = Dataset::from_samples(Domain::Target, rows).unwrap();
    let plain = train(
        LearnerKind::BoostedStumps,
        &WeightedSet::pooled(&[&replicated]).unwrap(),
        &hp,
    )
    .unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..500 {
        let t = -3.0 + 6.0 * i as f64 / 499.0;
        for x in [[t, 0.3 * t], [t, -t]] {
            let a = weighted.predict_score(&x).unwrap();
            let b = plain.predict_score(&x).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    ensure(
        worst <= 1e-9,
        format!("max score difference {worst:.2e} on a 500-point grid"),
    )
}

fn macro_f1_of(report: &hybrid_transfer::bench::EvalReport, kind: BaselineKind) -> f64 {
    report.summary_for(kind).map_or(f64::NAN, |s| s.macro_f1.mean)
}

fn benchmark_ranking() -> Check {
    let start = Instant::now();
    let mut cfg = BenchConfig::default();
    cfg.sweep.enabled = false;
    let report = run_benchmark(&ShiftScenario::default(), &cfg, 1).map_err(|e| e.to_string())?;
    let hybrid = macro_f1_of(&report, BaselineKind::Hybrid);
    let mut ok = !report.any_failures();
    let mut parts = vec![format!("hybrid {hybrid:.4}")];
    for kind in BaselineKind::ALL.into_iter().filter(|&k| k != BaselineKind::Hybrid) {
        let m = macro_f1_of(&report, kind);
        ok &= hybrid >= m;
        parts.push(format!("{kind} {m:.4}"));
    }
    for other in [BaselineKind::TargetOnly, BaselineKind::Union] {
        let t = report.comparison(other).expect("comparison present");
        ok &= t.p_value < 0.05;
        parts.push(format!("sign vs {other} {}/{} p={:.4}", t.wins, t.losses, t.p_value));
    }
    let detail = parts.join(", ");
    if !ok {
        return Err(format!("{detail}; {:.1}s", start.elapsed().as_secs_f64()));
    }
    within_time(start, Duration::from_secs(300), detail)
}

fn interior_peaks() -> Check {
    let start = Instant::now();
    let cfg = BenchConfig::default();
    let scn = ShiftScenario::default();
    let mut peaks = 0;
    for i in 0..cfg.replicates {
        let (source, target, test) = standardized(&scn.with_seed(cfg.data_seed(i)));
        let mut settings = cfg.settings.clone();
        settings.hyperparams.seed = cfg.fold_seed(i);
        let points = alpha_sweep(
            BaselineKind::Hybrid,
            &source,
            &target,
            &test,
            &cfg.sweep.grid,
            &settings,
        )
        .map_err(|e| e.to_string())?;
        peaks += usize::from(SweepCurve::new(BaselineKind::Hybrid, points).interior_peak);
    }
    let detail = format!("interior peak in {peaks}/{} seeds", cfg.replicates);
    if peaks < 16 {
        return Err(detail);
    }
    within_time(start, Duration::from_secs(600), detail)
}

fn adversarial_source() -> Check {
    let scn = ShiftScenario {
        kind: ShiftKind::LabelRatioShift,
        invert_source_labels: true,
        ..ShiftScenario::default()
    };
    let cfg = BenchConfig {
        baselines: vec![BaselineKind::TargetOnly, BaselineKind::Union, BaselineKind::Hybrid],
        sweep: hybrid_transfer::bench::SweepConfig {
            enabled: false,
            ..Default::default()
        },
        ..BenchConfig::default()
    };
    let report = run_benchmark(&scn, &cfg, 1).map_err(|e| e.to_string())?;
    let t = macro_f1_of(&report, BaselineKind::TargetOnly);
    let u = macro_f1_of(&report, BaselineKind::Union);
    let h = macro_f1_of(&report, BaselineKind::Hybrid);
    ensure(
        !report.any_failures() && h >= t - 0.02 && u < t - 0.05,
        format!("target-only {t:.4}, union {u:.4}, hybrid {h:.4}"),
    )
}

fn reproducibility() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cfg = ExperimentConfig {
        replicates: 2,
        scenario: ShiftScenario {
            n_source: 600,
            n_target_test: 400,
            positive_rate_source: 0.1,
            positive_rate_target: 0.1,
            ..ShiftScenario::default()
        },
        ..ExperimentConfig::default()
    };
    cfg.hyperparams.boosting_rounds = 30;
    cfg.alpha.grid = vec![0.25, 0.5, 0.75, 1.0];
    cfg.alpha.folds = 3;
    cfg.sweep.grid = cfg.alpha.grid.clone();
    let first = dir.path().join("first");
    write_run(&cfg, &first, 1).map_err(|e| e.to_string())?;
    let manifest = RunManifest::load(first.join("manifest.json")).map_err(|e| e.to_string())?;
    replay(&manifest, &dir.path().join("jobs4"), 4).map_err(|f| f.message().to_string())?;
    replay(&manifest, &dir.path().join("jobs1"), 1).map_err(|f| f.message().to_string())?;
    let a = std::fs::read(first.join("report.json")).map_err(|e| e.to_string())?;
    let b = std::fs::read(dir.path().join("jobs4/report.json")).map_err(|e| e.to_string())?;

    let synth_dir = dir.path().join("synth");
    write_synth(&cfg.scenario, &synth_dir).map_err(|e| e.to_string())?;
    let synth = RunManifest::load(synth_dir.join("manifest.json")).map_err(|e| e.to_string())?;
    replay(&synth, &dir.path().join("synth-again"), 3).map_err(|f| f.message().to_string())?;
    ensure(
        a == b,
        format!(
            "{} run outputs and {} synth outputs reproduced with 1 and 4 jobs",
            manifest.outputs.len(),
            synth.outputs.len()
        ),
    )
}

fn confusion_arithmetic() -> Check {
    let m = Metrics::from_confusion(Confusion {
        tp: 1,
        fp: 3,
        fn_: 2,
        tn: 94,
    });
    let f1_pos = 2.0 * 0.25 * (1.0 / 3.0) / (0.25 + 1.0 / 3.0);
    let (np, nr) = (94.0 / 96.0, 94.0 / 97.0);
    let f1_neg = 2.0 * np * nr / (np + nr);
    let expected = [
        ("precision", m.precision, 0.25),
        ("recall", m.recall, 1.0 / 3.0),
        ("f1_pos", m.f1_positive, f1_pos),
        ("accuracy", m.accuracy, 0.95),
        ("f1_neg", m.f1_negative, f1_neg),
        ("macro_f1", m.macro_f1, (f1_pos + f1_neg) / 2.0),
    ];
    let bad: Vec<String> = expected
        .iter()
        .filter(|(_, got, want)| (got - want).abs() > 1e-12)
        .map(|(name, got, want)| format!("{name} {got} vs {want}"))
        .collect();
    let rounded =
        (f1_pos - 0.2857).abs() < 5e-5 && (f1_neg - 0.9741).abs() < 5e-5 && (m.macro_f1 - 0.6299).abs() < 5e-5;
    ensure(
        bad.is_empty() && rounded,
        if bad.is_empty() {
            format!(
                "F1+ {:.4}, F1- {:.4}, macro {:.4}",
                m.f1_positive, m.f1_negative, m.macro_f1
            )
        } else {
            bad.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("endpoint identities", endpoint_identities),
        ("discriminator recovers the 1-D ratio", discriminator_recovery),
        ("Gaussian ratios", gaussian_ratios),
        ("gradient matches finite differences", gradient_check),
        ("integer weights equal replication", replication_equivalence),
        ("hybrid ranks first on the mean-shift benchmark", benchmark_ranking),
        ("alpha sweep peaks inside (0, 1)", interior_peaks),
        ("inverted-label source", adversarial_source),
        ("manifest replay is bit-exact", reproducibility),
        ("confusion-matrix arithmetic", confusion_arithmetic),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
