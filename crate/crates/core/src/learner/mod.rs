//! Base learners trained on the blended target/source objective
//!
//! ```text
//! (alpha / N_T) * sum_i loss(x_i) + ((1 - alpha) / N_S) * sum_j w_j * loss(x_j)
//! ```
//!
//! Both learners consume a [`WeightedSet`]: the pooled rows with one
//! coefficient each. Zero-coefficient rows are dropped and the rest are put
//! in a canonical order, so a trained model depends only on the multiset of
//! `(row, label, coefficient)` triples and never on input order.

mod logreg;
mod stumps;

use std::cmp::Ordering;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Hyperparams};
use crate::error::{check_dim, Error, Result};

pub use logreg::{train_logreg, train_weighted_logreg, LogisticObjective};
pub use stumps::{train_boosted_stumps, train_weighted_boosted_stumps, Stump};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerKind {
    #[serde(alias = "logreg")]
    LogReg,
    BoostedStumps,
}

impl LearnerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LearnerKind::LogReg => "log-reg",
            LearnerKind::BoostedStumps => "boosted-stumps",
        }
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-reg" | "logreg" => Ok(LearnerKind::LogReg),
            "boosted-stumps" | "stumps" => Ok(LearnerKind::BoostedStumps),
            other => Err(Error::param("learner", format!("unknown learner kind {other:?}"))),
        }
    }
}

/// Where a source weight vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Ones,
    Gaussian,
    Hybrid,
    Custom,
}

/// Per-source-sample weights, finite and within `[0, clip_max]` unless
/// built with [`WeightVector::unclipped`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl WeightVector {
    pub fn ones(n: usize) -> Self {
        Self {
            values: vec![1.0; n],
            provenance: Provenance::Ones,
        }
    }

    /// Clamps negatives to zero and caps at `clip_max`.
    pub fn clipped(values: Vec<f64>, clip_max: f64, provenance: Provenance) -> Result<Self> {
        if !(clip_max >= 1.0) {
            return Err(Error::param("clip_max", "must be at least 1"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSample("weight vector contains a non-finite entry".into()));
        }
        let values = values.into_iter().map(|v| v.clamp(0.0, clip_max)).collect();
        Ok(Self { values, provenance })
    }

    /// Keeps values as given, including negatives. Entries must be finite.
    pub fn unclipped(values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSample("weight vector contains a non-finite entry".into()));
        }
        Ok(Self { values, provenance })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Pooled training rows with one loss coefficient each.
///
/// Coefficients are rescaled by a power of two so that their sum lies in
/// `[1, 2)`. The rescaling is exact, so two sets whose coefficients differ
/// by a power-of-two factor become bit-identical.
#[derive(Debug, Clone)]
pub struct WeightedSet {
    d: usize,
    x: Vec<f64>,
    y: Vec<u8>,
    c: Vec<f64>,
    mass: f64,
}

fn canonical_cmp(a: (&[f64], u8, f64), b: (&[f64], u8, f64)) -> Ordering {
    for (u, v) in a.0.iter().zip(b.0) {
        match u.total_cmp(v) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.1.cmp(&b.1).then(a.2.total_cmp(&b.2))
}

impl WeightedSet {
    /// Builds a set from `(dataset, per-row coefficients)` parts.
    pub fn from_parts(d: usize, parts: &[(&Dataset, &[f64])]) -> Result<Self> {
        let mut entries: Vec<(&[f64], u8, f64)> = Vec::new();
        for (ds, coefs) in parts {
            check_dim(d, ds.d())?;
            if coefs.len() != ds.n() {
                return Err(Error::LengthMismatch {
                    what: "coefficients",
                    expected: ds.n(),
                    actual: coefs.len(),
                });
            }
            for (i, &c) in coefs.iter().enumerate() {
                if !c.is_finite() {
                    return Err(Error::InvalidSample(format!(
                        "coefficient {c} for row {i} is not finite"
                    )));
                }
                if c != 0.0 {
                    entries.push((ds.row(i), ds.label(i), c));
                }
            }
        }
        entries.sort_by(|a, b| canonical_cmp(*a, *b));

        let raw_mass: f64 = entries.iter().map(|e| e.2).sum();
        if !(raw_mass > 0.0 && raw_mass.is_finite()) {
            return Err(Error::NoSignal);
        }
        let mut scale = 1.0;
        while raw_mass * scale >= 2.0 {
            scale *= 0.5;
        }
        while raw_mass * scale < 1.0 {
            scale *= 2.0;
        }

        let mut x = Vec::with_capacity(entries.len() * d);
        let mut y = Vec::with_capacity(entries.len());
        let mut c = Vec::with_capacity(entries.len());
        for (row, label, coef) in entries {
            x.extend_from_slice(row);
            y.push(label);
            c.push(coef * scale);
        }
        Ok(Self {
            d,
            x,
            y,
            c,
            mass: raw_mass * scale,
        })
    }

    /// Target rows at `target_scale` each, source row `j` at
    /// `source_scale * w[j]`.
    pub fn from_scales(target: Option<(&Dataset, f64)>, source: Option<(&Dataset, f64, &[f64])>) -> Result<Self> {
        let d = target
            .map(|(t, _)| t.d())
            .or(source.map(|(s, _, _)| s.d()))
            .ok_or(Error::NoSignal)?;
        let tc: Vec<f64>;
        let sc: Vec<f64>;
        let mut parts: Vec<(&Dataset, &[f64])> = Vec::new();
        if let Some((t, scale)) = target {
            tc = vec![scale; t.n()];
            parts.push((t, &tc));
        }
        if let Some((s, scale, w)) = source {
            if w.len() != s.n() {
                return Err(Error::LengthMismatch {
                    what: "source weights",
                    expected: s.n(),
                    actual: w.len(),
                });
            }
            sc = w.iter().map(|wj| scale * wj).collect();
            parts.push((s, &sc));
        }
        Self::from_parts(d, &parts)
    }

    /// The blended objective's coefficients: `alpha / N_T` per target row and
    /// `((1 - alpha) / N_S) * w_j` per source row.
    pub fn blend(target: &Dataset, source: &Dataset, w: &[f64], alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::param("alpha", format!("{alpha} is outside [0, 1]")));
        }
        check_dim(target.d(), source.d())?;
        Self::from_scales(
            Some((target, alpha / target.n() as f64)),
            Some((source, (1.0 - alpha) / source.n() as f64, w)),
        )
    }

    /// Unweighted pooling: every row carries `1 / total rows`.
    pub fn pooled(datasets: &[&Dataset]) -> Result<Self> {
        let first = datasets.first().ok_or(Error::NoSignal)?;
        let total: usize = datasets.iter().map(|d| d.n()).sum();
        let coef = 1.0 / total as f64;
        let coefs: Vec<Vec<f64>> = datasets.iter().map(|d| vec![coef; d.n()]).collect();
        let parts: Vec<(&Dataset, &[f64])> = datasets
            .iter()
            .copied()
            .zip(coefs.iter().map(|c| c.as_slice()))
            .collect();
        Self::from_parts(first.d(), &parts)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn labels(&self) -> &[u8] {
        &self.y
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// Sum of the normalized coefficients, in `[1, 2)`.
    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// One trained predictor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelParams {
    LogReg {
        weights: Vec<f64>,
        intercept: f64,
    },
    BoostedStumps {
        base_score: f64,
        learning_rate: f64,
        stumps: Vec<Stump>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub hyperparams: Hyperparams,
    pub seed: u64,
    /// Training objective at the returned parameters.
    pub objective: f64,
    /// L2 penalty share of `objective` (zero for stumps).
    pub l2_penalty: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Training objective after each optimizer step or boosting round.
    #[serde(skip)]
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub params: ModelParams,
    pub meta: TrainingMeta,
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format_version: u32,
    #[serde(flatten)]
    model: Model,
}

impl Model {
    pub fn kind(&self) -> LearnerKind {
        match self.params {
            ModelParams::LogReg { .. } => LearnerKind::LogReg,
            ModelParams::BoostedStumps { .. } => LearnerKind::BoostedStumps,
        }
    }

    pub fn d(&self) -> Option<usize> {
        match &self.params {
            ModelParams::LogReg { weights, .. } => Some(weights.len()),
            ModelParams::BoostedStumps { .. } => None,
        }
    }

    fn score_unchecked(&self, x: &[f64]) -> f64 {
        match &self.params {
            ModelParams::LogReg { weights, intercept } => {
                weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + intercept
            }
            ModelParams::BoostedStumps {
                base_score,
                learning_rate,
                stumps,
            } => {
                let sum: f64 = stumps.iter().map(|s| s.eval(x)).sum();
                base_score + learning_rate * sum
            }
        }
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        match &self.params {
            ModelParams::LogReg { weights, .. } => check_dim(weights.len(), x.len()),
            ModelParams::BoostedStumps { stumps, .. } => match stumps.iter().map(|s| s.feature).max() {
                Some(f) if f >= x.len() => Err(Error::DimensionMismatch {
                    expected: f + 1,
                    actual: x.len(),
                }),
                _ => Ok(()),
            },
        }
    }

    /// `x.w + c` for logistic models, the additive score for stumps.
    pub fn predict_score(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        Ok(self.score_unchecked(x))
    }

    /// 1 iff the score is strictly positive.
    pub fn predict_label(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.predict_score(x)? > 0.0))
    }

    /// Signed distance-like margin: geometric `(x.w + c) / |w|` for logistic
    /// models (0 when `w = 0`), the raw additive score for stumps.
    pub fn decision_margin(&self, x: &[f64]) -> Result<f64> {
        let score = self.predict_score(x)?;
        Ok(match &self.params {
            ModelParams::LogReg { weights, .. } => {
                let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
                if norm > 0.0 {
                    score / norm
                } else {
                    0.0
                }
            }
            ModelParams::BoostedStumps { .. } => score,
        })
    }

    pub fn predict_labels(&self, ds: &Dataset) -> Result<Vec<u8>> {
        ds.rows().map(|r| self.predict_label(r)).collect()
    }

    pub fn predict_scores(&self, ds: &Dataset) -> Result<Vec<f64>> {
        ds.rows().map(|r| self.predict_score(r)).collect()
    }

    /// Per-sample log loss `log(1 + e^s) - y s` on the model score.
    pub fn sample_loss(&self, x: &[f64], y: u8) -> Result<f64> {
        Ok(log_loss(self.predict_score(x)?, y))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelDocument {
            format_version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(s)?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "unsupported model format version {}",
                doc.format_version
            )));
        }
        Ok(doc.model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// `log(1 + exp(z))` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn log_loss(score: f64, y: u8) -> f64 {
    softplus(score) - f64::from(y) * score
}

/// Value of the blended objective for a trained model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue {
    /// `alpha * mean target loss + (1 - alpha) * sum_j (w_j / N_S) * loss_j`.
    pub value: f64,
    /// `(l2 / 2) |w|^2` for logistic models, reported separately.
    pub l2_penalty: f64,
}

/// Evaluates the blended objective at `model`.
pub fn weighted_objective(
    model: &Model,
    target: &Dataset,
    source: &Dataset,
    w: &WeightVector,
    alpha: f64,
) -> Result<ObjectiveValue> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("{alpha} is outside [0, 1]")));
    }
    check_dim(target.d(), source.d())?;
    if w.len() != source.n() {
        return Err(Error::LengthMismatch {
            what: "source weights",
            expected: source.n(),
            actual: w.len(),
        });
    }
    let mut target_sum = 0.0;
    for (row, &y) in target.rows().zip(target.labels()) {
        target_sum += model.sample_loss(row, y)?;
    }
    let target_mean = target_sum / target.n() as f64;
    let ns = source.n() as f64;
    let mut source_term = 0.0;
    for ((row, &y), wj) in source.rows().zip(source.labels()).zip(&w.values) {
        let share = wj / ns;
        if share != 0.0 {
            source_term += share * model.sample_loss(row, y)?;
        }
    }
    let value = alpha * target_mean + (1.0 - alpha) * source_term;
    if !value.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let l2_penalty = match &model.params {
        ModelParams::LogReg { weights, .. } => {
            0.5 * model.meta.hyperparams.l2_reg * weights.iter().map(|v| v * v).sum::<f64>()
        }
        ModelParams::BoostedStumps { .. } => 0.0,
    };
    Ok(ObjectiveValue { value, l2_penalty })
}

/// Trains `kind` on an already-built weighted set.
pub fn train(kind: LearnerKind, set: &WeightedSet, hp: &Hyperparams) -> Result<Model> {
    match kind {
        LearnerKind::LogReg => train_logreg(set, hp),
        LearnerKind::BoostedStumps => train_boosted_stumps(set, hp),
    }
}

/// Blended-objective training with source weights `w` and `hp.alpha`.
pub fn train_weighted(
    kind: LearnerKind,
    target: &Dataset,
    source: &Dataset,
    w: &WeightVector,
    hp: &Hyperparams,
) -> Result<Model> {
    hp.validate()?;
    let set = WeightedSet::blend(target, source, &w.values, hp.alpha)?;
    train(kind, &set, hp)
}

/// Plain training on the pooled rows of `datasets`.
pub fn train_unweighted(kind: LearnerKind, datasets: &[&Dataset], hp: &Hyperparams) -> Result<Model> {
    hp.validate()?;
    let set = WeightedSet::pooled(datasets)?;
    train(kind, &set, hp)
}
