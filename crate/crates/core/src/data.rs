//! Labeled feature matrices tagged with their domain, plus the pooled
//! standardizer and the shared hyperparameter bundle.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Which side of the transfer a dataset belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Source,
    Target,
}

impl Domain {
    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Source => "source",
            Domain::Target => "target",
        }
    }
}

/// A single labeled observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Vec<f64>,
    pub label: u8,
}

impl Sample {
    pub fn new(features: Vec<f64>, label: u8) -> Self {
        Self { features, label }
    }
}

/// Row-major feature matrix with binary labels.
///
/// The domain tag is fixed at construction. Every row has the same
/// dimension, every value is finite and every label is 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    domain: Domain,
    d: usize,
    x: Vec<f64>,
    y: Vec<u8>,
}

impl Dataset {
    pub fn new(domain: Domain, d: usize, x: Vec<f64>, y: Vec<u8>) -> Result<Self> {
        if y.is_empty() {
            return Err(Error::EmptyDataset(format!("{} dataset has no rows", domain.as_str())));
        }
        if d == 0 {
            return Err(Error::param("d", "feature dimension must be at least 1"));
        }
        if x.len() != y.len() * d {
            return Err(Error::LengthMismatch {
                what: "feature matrix",
                expected: y.len() * d,
                actual: x.len(),
            });
        }
        if let Some(pos) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "row {} feature {} is not finite",
                pos / d,
                pos % d
            )));
        }
        if let Some(pos) = y.iter().position(|&l| l > 1) {
            return Err(Error::InvalidSample(format!(
                "row {pos} has label {} (expected 0 or 1)",
                y[pos]
            )));
        }
        Ok(Self { domain, d, x, y })
    }

    pub fn from_samples(domain: Domain, samples: Vec<Sample>) -> Result<Self> {
        let d = samples
            .first()
            .map(|s| s.features.len())
            .ok_or_else(|| Error::EmptyDataset(format!("{} dataset has no rows", domain.as_str())))?;
        let mut x = Vec::with_capacity(samples.len() * d);
        let mut y = Vec::with_capacity(samples.len());
        for s in samples {
            check_dim(d, s.features.len())?;
            x.extend_from_slice(&s.features);
            y.push(s.label);
        }
        Self::new(domain, d, x, y)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.x.chunks_exact(self.d)
    }

    pub fn label(&self, i: usize) -> u8 {
        self.y[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.y
    }

    pub fn features(&self) -> &[f64] {
        &self.x
    }

    pub fn sample(&self, i: usize) -> Sample {
        Sample::new(self.row(i).to_vec(), self.y[i])
    }

    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&l| l == 1).count()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut x = Vec::with_capacity(indices.len() * self.d);
        let mut y = Vec::with_capacity(indices.len());
        for &i in indices {
            x.extend_from_slice(self.row(i));
            y.push(self.y[i]);
        }
        Self::new(self.domain, self.d, x, y)
    }

    /// Rows of `self` followed by rows of `other`, keeping `self`'s domain.
    pub fn concat(&self, other: &Dataset) -> Result<Self> {
        check_dim(self.d, other.d)?;
        let mut x = self.x.clone();
        x.extend_from_slice(&other.x);
        let mut y = self.y.clone();
        y.extend_from_slice(&other.y);
        Self::new(self.domain, self.d, x, y)
    }

    pub fn with_labels(&self, y: Vec<u8>) -> Result<Self> {
        if y.len() != self.n() {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: self.n(),
                actual: y.len(),
            });
        }
        Self::new(self.domain, self.d, self.x.clone(), y)
    }

    pub fn with_domain(&self, domain: Domain) -> Self {
        Self { domain, ..self.clone() }
    }
}

/// Per-feature affine map `(x - mean) / scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    pub fn new(mean: Vec<f64>, scale: Vec<f64>) -> Result<Self> {
        check_dim(mean.len(), scale.len())?;
        if scale.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::param("scale", "entries must be finite and strictly positive"));
        }
        Ok(Self { mean, scale })
    }

    /// Fits mean and population standard deviation over the pooled rows of
    /// every dataset. Constant columns get scale 1.
    pub fn fit(datasets: &[&Dataset]) -> Result<Self> {
        let first = datasets
            .first()
            .ok_or_else(|| Error::param("datasets", "at least one dataset is required"))?;
        let d = first.d();
        for ds in datasets {
            check_dim(d, ds.d())?;
        }
        let total: usize = datasets.iter().map(|ds| ds.n()).sum();
        let mut mean = vec![0.0; d];
        for ds in datasets {
            for row in ds.rows() {
                for (m, v) in mean.iter_mut().zip(row) {
                    *m += v;
                }
            }
        }
        mean.iter_mut().for_each(|m| *m /= total as f64);

        let mut var = vec![0.0; d];
        for ds in datasets {
            for row in ds.rows() {
                for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
                    let c = v - m;
                    *s += c * c;
                }
            }
        }
        let scale = var
            .into_iter()
            .zip(&mean)
            .map(|(s, m)| {
                let sd = (s / total as f64).sqrt();
                // Constant columns (up to rounding of the mean) pass through centered.
                if sd.is_finite() && sd > 1e-12 * (1.0 + m.abs()) {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, scale })
    }

    pub fn d(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }

    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        check_dim(self.d(), ds.d())?;
        let x = ds
            .rows()
            .flat_map(|row| {
                row.iter()
                    .zip(self.mean.iter().zip(&self.scale))
                    .map(|(v, (m, s))| (v - m) / s)
            })
            .collect();
        Dataset::new(ds.domain(), ds.d(), x, ds.labels().to_vec())
    }

    pub fn invert(&self, ds: &Dataset) -> Result<Dataset> {
        check_dim(self.d(), ds.d())?;
        let x = ds
            .rows()
            .flat_map(|row| {
                row.iter()
                    .zip(self.mean.iter().zip(&self.scale))
                    .map(|(v, (m, s))| v * s + m)
            })
            .collect();
        Dataset::new(ds.domain(), ds.d(), x, ds.labels().to_vec())
    }
}

/// Knobs shared by every learner and baseline in one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    /// Overall share of the objective carried by target samples.
    pub alpha: f64,
    pub l2_reg: f64,
    pub weight_clip_max: f64,
    pub boosting_rounds: usize,
    pub learning_rate: f64,
    pub min_child_hessian: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            l2_reg: 1e-2,
            weight_clip_max: 10.0,
            boosting_rounds: 200,
            learning_rate: 0.1,
            min_child_hessian: 1e-6,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::param("alpha", format!("{} is outside [0, 1]", self.alpha)));
        }
        if !(self.l2_reg >= 0.0 && self.l2_reg.is_finite()) {
            return Err(Error::param("l2_reg", "must be finite and nonnegative"));
        }
        if !(self.weight_clip_max >= 1.0 && self.weight_clip_max.is_finite()) {
            return Err(Error::param("weight_clip_max", "must be finite and at least 1"));
        }
        if self.boosting_rounds == 0 {
            return Err(Error::param("boosting_rounds", "must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::param("learning_rate", "must be finite and positive"));
        }
        if !(self.min_child_hessian >= 0.0 && self.min_child_hessian.is_finite()) {
            return Err(Error::param("min_child_hessian", "must be finite and nonnegative"));
        }
        Ok(())
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..self.clone() }
    }
}
