//! Experiment configuration files and run manifests.
//!
//! An experiment is a TOML document:
//!
//! ```toml
//! schema_version = 1
//! seed = 7
//! replicates = 20
//! learner = "boosted-stumps"
//! baselines = ["target-only", "union", "hybrid"]
//!
//! [scenario]
//! kind = "mean-shift"
//! shift_magnitude = 1.5
//!
//! [alpha]
//! mode = "cv"
//! folds = 5
//! ```
//!
//! Missing keys take their defaults. Instead of `[scenario]`, a `[data]`
//! table may name CSV files for the source, target training and target
//! test sets. Every run writes a JSON manifest holding the resolved
//! configuration and SHA-256 digests of its inputs and outputs; replaying
//! the manifest reproduces the outputs byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bench::{AlphaConfig, BenchConfig, SweepConfig};
use crate::data::{Domain, Hyperparams};
use crate::error::{Error, Result};
use crate::io::{load_dataset, CsvSchema};
use crate::learner::LearnerKind;
use crate::pipeline::{BaselineKind, HybridConfig, PipelineSettings};
use crate::synth::{ShiftScenario, ShiftSplits};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_VERSION: u32 = 1;

/// CSV inputs for a run on external data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    pub source: PathBuf,
    pub target_train: PathBuf,
    pub target_test: PathBuf,
    #[serde(default = "default_label_column")]
    pub label_column: String,
}

fn default_label_column() -> String {
    "label".into()
}

impl DataPaths {
    pub fn paths(&self) -> [&Path; 3] {
        [&self.source, &self.target_train, &self.target_test]
    }

    pub fn load(&self) -> Result<ShiftSplits> {
        let schema = CsvSchema::with_label(self.label_column.clone());
        Ok(ShiftSplits {
            source: load_dataset(&self.source, &schema, Domain::Source)?,
            target_train: load_dataset(&self.target_train, &schema, Domain::Target)?,
            target_test: load_dataset(&self.target_test, &schema, Domain::Target)?,
        })
    }

    /// Resolves relative paths against `base`.
    fn rebase(&mut self, base: &Path) {
        for p in [&mut self.source, &mut self.target_train, &mut self.target_test] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub replicates: usize,
    pub learner: LearnerKind,
    pub baselines: Vec<BaselineKind>,
    /// Standardize features on source plus target training rows.
    pub standardize: bool,
    /// Covariance ridge for the Gaussian baseline.
    pub ridge_eps: f64,
    pub scenario: ShiftScenario,
    pub data: Option<DataPaths>,
    pub hyperparams: Hyperparams,
    pub hybrid: HybridConfig,
    pub alpha: AlphaConfig,
    pub sweep: SweepConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let bench = BenchConfig::default();
        Self {
            schema_version: SCHEMA_VERSION,
            seed: bench.seed,
            replicates: bench.replicates,
            learner: bench.settings.learner,
            baselines: bench.baselines,
            standardize: bench.standardize,
            ridge_eps: bench.settings.ridge_eps,
            scenario: ShiftScenario::default(),
            data: None,
            hyperparams: bench.settings.hyperparams,
            hybrid: bench.settings.hybrid,
            alpha: bench.alpha,
            sweep: bench.sweep,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    /// Reads a config file; relative data paths are taken from the file's
    /// directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let mut cfg = Self::from_toml(&fs::read_to_string(path)?)?;
        if let (Some(data), Some(dir)) = (cfg.data.as_mut(), path.parent()) {
            data.rebase(dir);
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn bench(&self) -> BenchConfig {
        BenchConfig {
            seed: self.seed,
            replicates: self.replicates,
            baselines: self.baselines.clone(),
            standardize: self.standardize,
            settings: PipelineSettings {
                learner: self.learner,
                hyperparams: self.hyperparams.clone(),
                hybrid: self.hybrid.clone(),
                ridge_eps: self.ridge_eps,
            },
            alpha: self.alpha.clone(),
            sweep: self.sweep.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bench().validate()?;
        if self.data.is_none() {
            self.scenario.validate()?;
        }
        Ok(())
    }

    /// Data seeds of every replicate, in order.
    pub fn seeds(&self) -> Vec<u64> {
        let bench = self.bench();
        (0..self.replicates)
            .map(|i| {
                if self.data.is_some() {
                    self.seed
                } else {
                    bench.data_seed(i)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Ok(Self {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        })
    }
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Resolved settings of the command that produced a directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Invocation {
    Synth { scenario: ShiftScenario },
    Weights { spec: WeightsSpec },
    Run { config: Box<ExperimentConfig> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMethod {
    /// Density ratio from the linear domain discriminator.
    Discriminative,
    Gaussian,
    Hybrid,
    Ones,
}

/// Inputs and settings of a standalone weight computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightsSpec {
    pub method: WeightMethod,
    pub source: PathBuf,
    pub target: PathBuf,
    pub label_column: String,
    pub standardize: bool,
    pub settings: PipelineSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub tool_version: String,
    pub invocation: Invocation,
    pub seeds: Vec<u64>,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the manifest's directory.
    pub outputs: Vec<FileDigest>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl RunManifest {
    pub fn new(invocation: Invocation, seeds: Vec<u64>) -> Self {
        Self {
            manifest_version: MANIFEST_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            invocation,
            seeds,
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, path: impl AsRef<Path>) -> Result<()> {
        self.inputs.push(FileDigest::of(path)?);
        Ok(())
    }

    /// Records `dir/name` under its relative name.
    pub fn add_output(&mut self, dir: impl AsRef<Path>, name: &str) -> Result<()> {
        let digest = FileDigest::of(dir.as_ref().join(name))?;
        self.outputs.push(FileDigest {
            path: PathBuf::from(name),
            sha256: digest.sha256,
        });
        Ok(())
    }

    pub fn write(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let path = dir.as_ref().join(MANIFEST_FILE);
        fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let m: Self = serde_json::from_str(&fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if m.manifest_version != MANIFEST_VERSION {
            return Err(Error::Config(format!(
                "manifest version {} is not supported",
                m.manifest_version
            )));
        }
        Ok(m)
    }

    /// Inputs whose current contents differ from the recorded digest.
    pub fn changed_inputs(&self) -> Result<Vec<PathBuf>> {
        let mut changed = Vec::new();
        for input in &self.inputs {
            if !input.path.exists() || sha256_file(&input.path)? != input.sha256 {
                changed.push(input.path.clone());
            }
        }
        Ok(changed)
    }

    /// Outputs in `dir` whose contents differ from the recorded digest.
    pub fn mismatched_outputs(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let mut bad = Vec::new();
        for out in &self.outputs {
            let p = dir.as_ref().join(&out.path);
            if !p.exists() || sha256_file(&p)? != out.sha256 {
                bad.push(out.path.clone());
            }
        }
        Ok(bad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_default() {
        let cfg = ExperimentConfig::from_toml("schema_version = 1").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn toml_round_trip() {
        let mut cfg = ExperimentConfig {
            baselines: vec![BaselineKind::TargetOnly, BaselineKind::Hybrid],
            learner: LearnerKind::LogReg,
            ..ExperimentConfig::default()
        };
        cfg.hyperparams.alpha = 0.3;
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_unknown_keys_and_versions() {
        assert!(ExperimentConfig::from_toml("schema_version = 1\nfoo = 3").is_err());
        assert!(ExperimentConfig::from_toml("schema_version = 2").is_err());
        assert!(ExperimentConfig::from_toml("schema_version = 1\n[scenario]\nkind = \"bogus\"").is_err());
    }

    #[test]
    fn relative_data_paths_follow_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.toml");
        fs::write(
            &path,
            "schema_version = 1\n[data]\nsource = \"s.csv\"\ntarget_train = \"t.csv\"\ntarget_test = \"/abs/x.csv\"\n",
        )
        .unwrap();
        let cfg = ExperimentConfig::load(&path).unwrap();
        let data = cfg.data.unwrap();
        assert_eq!(data.source, dir.path().join("s.csv"));
        assert_eq!(data.target_test, PathBuf::from("/abs/x.csv"));
    }

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "hello").unwrap();
        let mut m = RunManifest::new(
            Invocation::Synth {
                scenario: ShiftScenario::default(),
            },
            vec![1, 2],
        );
        m.add_output(dir.path(), "a.txt").unwrap();
        assert_eq!(
            m.outputs[0].sha256,
            "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
        );
        let p = m.write(dir.path()).unwrap();
        assert_eq!(RunManifest::load(&p).unwrap(), m);
        assert!(m.mismatched_outputs(dir.path()).unwrap().is_empty());
        fs::write(dir.path().join("a.txt"), "changed").unwrap();
        assert_eq!(m.mismatched_outputs(dir.path()).unwrap().len(), 1);
    }
}
