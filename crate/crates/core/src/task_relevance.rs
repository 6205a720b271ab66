//! Signed task-relevance weights from a model trained on source and target
//! together: `+|margin|` when the model classifies a source sample
//! correctly, `-|margin|` when it does not.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{Dataset, Hyperparams};
use crate::error::{check_dim, Result};
use crate::io::write_columns;
use crate::learner::{self, LearnerKind, Model, WeightVector};

/// Target share under which the blended objective with unit weights is the
/// plain pooled mean.
pub fn union_alpha(n_target: usize, n_source: usize) -> f64 {
    n_target as f64 / (n_target + n_source) as f64
}

/// Unweighted fit on source and target pooled.
pub fn fit_union_model(source: &Dataset, target: &Dataset, hp: &Hyperparams, learner: LearnerKind) -> Result<Model> {
    check_dim(target.d(), source.d())?;
    let hp = hp.with_alpha(union_alpha(target.n(), source.n()));
    learner::train_weighted(learner, target, source, &WeightVector::ones(source.n()), &hp)
}

/// Applies the sign rule to a precomputed margin.
pub fn signed_relevance(margin: f64, y: u8) -> f64 {
    let predicted = u8::from(margin > 0.0);
    if predicted == y {
        margin.abs()
    } else {
        -margin.abs()
    }
}

pub fn task_weight(model: &Model, x: &[f64], y: u8) -> Result<f64> {
    Ok(signed_relevance(model.decision_margin(x)?, y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskWeightReport {
    pub weights: Vec<f64>,
    pub predicted: Vec<u8>,
    /// Short digest of the serialized union model.
    pub union_model_id: String,
    pub fraction_negative: f64,
    /// `geometric` for logistic models, `additive-score` for stumps.
    pub margin_kind: String,
}

impl TaskWeightReport {
    pub fn correct(&self, source: &Dataset) -> Vec<bool> {
        self.predicted
            .iter()
            .zip(source.labels())
            .map(|(p, y)| p == y)
            .collect()
    }

    /// Columns `w_task,predicted,correct`.
    pub fn write_csv(&self, path: impl AsRef<Path>, source: &Dataset) -> Result<()> {
        let predicted: Vec<f64> = self.predicted.iter().map(|&p| f64::from(p)).collect();
        let correct: Vec<f64> = self
            .correct(source)
            .into_iter()
            .map(|c| f64::from(u8::from(c)))
            .collect();
        write_columns(
            path,
            &[
                ("w_task", &self.weights),
                ("predicted", &predicted),
                ("correct", &correct),
            ],
        )
    }
}

pub fn model_id(model: &Model) -> Result<String> {
    let digest = Sha256::digest(model.to_json()?.as_bytes());
    Ok(hex::encode(&digest[..8]))
}

pub fn task_weights_for_source(model: &Model, source: &Dataset) -> Result<TaskWeightReport> {
    let mut weights = Vec::with_capacity(source.n());
    let mut predicted = Vec::with_capacity(source.n());
    for (row, &y) in source.rows().zip(source.labels()) {
        let margin = model.decision_margin(row)?;
        predicted.push(u8::from(margin > 0.0));
        weights.push(signed_relevance(margin, y));
    }
    let negative = weights.iter().filter(|&&w| w < 0.0).count();
    Ok(TaskWeightReport {
        fraction_negative: negative as f64 / source.n() as f64,
        weights,
        predicted,
        union_model_id: model_id(model)?,
        margin_kind: match model.kind() {
            LearnerKind::LogReg => "geometric".into(),
            LearnerKind::BoostedStumps => "additive-score".into(),
        },
    })
}
