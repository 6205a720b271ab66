//! A config-driven run and its manifest replay, the library side of
//! `hybrid-transfer run --config` and `run --manifest`.

use hybrid_transfer::cli::{replay, write_run};
use hybrid_transfer::config::{ExperimentConfig, RunManifest};
use hybrid_transfer::{BaselineKind, Error, Result};

const CONFIG: &str = r#"
schema_version = 1
seed = 7
replicates = 2
baselines = ["target-only", "union", "hybrid"]

[scenario]
n_source = 800
n_target_test = 500
positive_rate_source = 0.1
positive_rate_target = 0.1

[hyperparams]
boosting_rounds = 40

[alpha]
grid = [0.25, 0.5, 0.75, 1.0]
folds = 3

[sweep]
grid = [0.25, 0.5, 0.75, 1.0]
baselines = ["hybrid"]
"#;

pub fn run_example() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("experiment.toml");
    std::fs::write(&path, CONFIG)?;
    let cfg = ExperimentConfig::load(&path)?;

    let first = dir.path().join("first");
    let (manifest, report) = write_run(&cfg, &first, 1)?;
    if let Some(s) = report.summary_for(BaselineKind::Hybrid) {
        println!("hybrid macro-F1 {:.4} ± {:.4}", s.macro_f1.mean, s.macro_f1.sd);
    }
    for o in &manifest.outputs {
        println!("{}  {}", &o.sha256[..16], o.path.display());
    }

    // Replaying with more threads must reproduce every file byte for byte.
    let manifest = RunManifest::load(first.join("manifest.json"))?;
    replay(&manifest, &dir.path().join("second"), 2).map_err(|f| Error::Config(f.message().to_string()))?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
