//! A small multi-seed benchmark: every baseline per seed, mean ± sd,
//! paired sign tests against Hybrid and alpha-sweep summaries. The report
//! is written as JSON and checked against its stored predictions.
//!
//! Run with `-- <replicates> <jobs>` to change the defaults (3 and 1).

use hybrid_transfer::bench::{format_summary, run_benchmark, BenchConfig, EvalReport};
use hybrid_transfer::{Result, ShiftScenario};

pub fn run_example_with(replicates: usize, jobs: usize) -> Result<EvalReport> {
    let scn = ShiftScenario {
        n_source: 1000,
        n_target_test: 1000,
        positive_rate_source: 0.1,
        positive_rate_target: 0.1,
        ..ShiftScenario::default()
    };
    let mut cfg = BenchConfig {
        replicates,
        ..BenchConfig::default()
    };
    cfg.settings.hyperparams.boosting_rounds = 50;
    cfg.alpha.grid = vec![0.2, 0.5, 0.8, 1.0];
    cfg.alpha.folds = 3;
    let report = run_benchmark(&scn, &cfg, jobs)?;
    report.verify()?;
    print!("{}", format_summary(&report));
    Ok(report)
}

pub fn run_example() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let replicates = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let jobs = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let report = run_example_with(replicates, jobs)?;
    let dir = std::env::temp_dir().join("hybrid-transfer-benchmark-example");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("report.json"), report.to_json()?)?;
    report.write_sweep_csvs(&dir)?;
    println!("report and sweep CSVs in {}", dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
