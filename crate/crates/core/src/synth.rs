//! Synthetic source/target splits with controlled domain shift.
//!
//! Both domains use class-conditional Gaussians with identity covariance:
//! negatives centered at the origin, positives at `class_separation * u`
//! for a random unit vector `u`. Each kind then perturbs the target side:
//!
//! | kind               | target differs by                                   |
//! |--------------------|-----------------------------------------------------|
//! | `MeanShift`        | both class means translated by `shift_magnitude * v`|
//! | `CovarianceShift`  | noise scaled by `1 + shift_magnitude`               |
//! | `LabelRatioShift`  | only the positive rates                             |
//! | `MissingSubclass`  | positives split over two clusters; source has one   |
//!
//! Class counts are exact (`round(rate * n)`, at least one of each class
//! when `n >= 2`); their positions are shuffled.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Domain};
use crate::error::{Error, Result};
use crate::rng::stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftKind {
    MeanShift,
    CovarianceShift,
    LabelRatioShift,
    MissingSubclass,
}

impl std::str::FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean-shift" => Ok(ShiftKind::MeanShift),
            "covariance-shift" => Ok(ShiftKind::CovarianceShift),
            "label-ratio-shift" => Ok(ShiftKind::LabelRatioShift),
            "missing-subclass" => Ok(ShiftKind::MissingSubclass),
            other => Err(Error::param("kind", format!("unknown scenario kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftScenario {
    pub kind: ShiftKind,
    pub d: usize,
    pub n_source: usize,
    pub n_target_train: usize,
    pub n_target_test: usize,
    pub shift_magnitude: f64,
    pub positive_rate_source: f64,
    pub positive_rate_target: f64,
    /// Distance between the class means.
    pub class_separation: f64,
    /// Flip every source label after generation (adversarial source).
    pub invert_source_labels: bool,
    pub seed: u64,
}

impl Default for ShiftScenario {
    fn default() -> Self {
        Self {
            kind: ShiftKind::MeanShift,
            d: 10,
            n_source: 5000,
            n_target_train: 200,
            n_target_test: 2000,
            shift_magnitude: 1.5,
            positive_rate_source: 0.05,
            positive_rate_target: 0.05,
            class_separation: 2.0,
            invert_source_labels: false,
            seed: 0,
        }
    }
}

impl ShiftScenario {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::param("d", "must be at least 1"));
        }
        for (name, n) in [
            ("n_source", self.n_source),
            ("n_target_train", self.n_target_train),
            ("n_target_test", self.n_target_test),
        ] {
            if n == 0 {
                return Err(Error::param(name, "must be at least 1"));
            }
        }
        for (name, r) in [
            ("positive_rate_source", self.positive_rate_source),
            ("positive_rate_target", self.positive_rate_target),
        ] {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::param(name, format!("{r} is outside (0, 1)")));
            }
        }
        if !(self.shift_magnitude >= 0.0 && self.shift_magnitude.is_finite()) {
            return Err(Error::param("shift_magnitude", "must be finite and nonnegative"));
        }
        if !(self.class_separation >= 0.0 && self.class_separation.is_finite()) {
            return Err(Error::param("class_separation", "must be finite and nonnegative"));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

/// Generated splits; features are raw (not standardized).
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSplits {
    pub source: Dataset,
    pub target_train: Dataset,
    pub target_test: Dataset,
}

fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

struct Geometry {
    positive_a: Vec<f64>,
    positive_b: Vec<f64>,
    shift: Vec<f64>,
}

fn class_counts(n: usize, rate: f64) -> usize {
    let pos = (rate * n as f64).round() as usize;
    if n >= 2 {
        pos.clamp(1, n - 1)
    } else {
        pos.min(n)
    }
}

fn draw(scn: &ShiftScenario, geo: &Geometry, domain: Domain, n: usize, rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let is_target = domain == Domain::Target;
    let rate = if is_target {
        scn.positive_rate_target
    } else {
        scn.positive_rate_source
    };
    let mut labels = vec![0u8; n];
    labels[..class_counts(n, rate)].fill(1);
    labels.shuffle(rng);

    let noise_scale = if is_target && scn.kind == ShiftKind::CovarianceShift {
        1.0 + scn.shift_magnitude
    } else {
        1.0
    };
    let offset: Vec<f64> = if is_target && scn.kind == ShiftKind::MeanShift {
        geo.shift.iter().map(|v| v * scn.shift_magnitude).collect()
    } else {
        vec![0.0; scn.d]
    };

    let mut x = Vec::with_capacity(n * scn.d);
    for &y in &labels {
        let center: &[f64] = if y == 0 {
            &[]
        } else if scn.kind == ShiftKind::MissingSubclass && is_target && rng.random_bool(0.5) {
            &geo.positive_b
        } else {
            &geo.positive_a
        };
        for (j, off) in offset.iter().enumerate().take(scn.d) {
            let z: f64 = rng.sample(StandardNormal);
            let mu = center.get(j).copied().unwrap_or(0.0);
            x.push(mu + off + noise_scale * z);
        }
    }
    if domain == Domain::Source && scn.invert_source_labels {
        labels.iter_mut().for_each(|l| *l = 1 - *l);
    }
    Dataset::new(domain, scn.d, x, labels)
}

/// Deterministic in `scn` (including its seed).
pub fn synth_shift(scn: &ShiftScenario) -> Result<ShiftSplits> {
    scn.validate()?;
    let mut geo_rng = stream(scn.seed, "synth/geometry", 0);
    let u = unit_vector(&mut geo_rng, scn.d);
    let u2 = unit_vector(&mut geo_rng, scn.d);
    let shift = unit_vector(&mut geo_rng, scn.d);
    let geo = Geometry {
        positive_a: u.iter().map(|v| v * scn.class_separation).collect(),
        positive_b: u2.iter().map(|v| v * scn.class_separation).collect(),
        shift,
    };
    let source = draw(
        scn,
        &geo,
        Domain::Source,
        scn.n_source,
        &mut stream(scn.seed, "synth/source", 0),
    )?;
    let target_train = draw(
        scn,
        &geo,
        Domain::Target,
        scn.n_target_train,
        &mut stream(scn.seed, "synth/target-train", 0),
    )?;
    let target_test = draw(
        scn,
        &geo,
        Domain::Target,
        scn.n_target_test,
        &mut stream(scn.seed, "synth/target-test", 0),
    )?;
    Ok(ShiftSplits {
        source,
        target_train,
        target_test,
    })
}
