//! Weighted gradient boosting with depth-1 trees and log loss.
//!
//! Each round fits the stump maximizing the second-order gain
//! `G_L^2 / H_L + G_R^2 / H_R - G^2 / H`, where every gradient and hessian
//! term is multiplied by its row coefficient. Integer coefficients are
//! therefore equivalent to replicating rows. Leaf values are the Newton
//! steps `-G / H`, shrunk by the learning rate and halved further if the
//! round would otherwise increase the training objective.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Hyperparams};
use crate::error::{Error, Result};

use super::{Model, ModelParams, TrainingMeta, WeightVector, WeightedSet};

const MAX_STEP_HALVINGS: usize = 30;

/// `left` if `x[feature] < threshold`, else `right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub left: f64,
    pub right: f64,
}

impl Stump {
    pub fn eval(&self, x: &[f64]) -> f64 {
        if x[self.feature] < self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

struct Split {
    gain: f64,
    feature: usize,
    threshold: f64,
    left: f64,
    right: f64,
}

/// Weighted log loss of `scores`; also stores the predicted probabilities.
/// Shares one exponential per row between the loss and the sigmoid, with
/// the same arithmetic as `log_loss` and `sigmoid`.
fn objective_and_probs(set: &WeightedSet, scores: &[f64], probs: &mut [f64]) -> f64 {
    let mut total = 0.0;
    for (i, ((&s, &y), &c)) in scores.iter().zip(set.labels()).zip(set.coefficients()).enumerate() {
        let e = (-s.abs()).exp();
        probs[i] = if s >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
        total += c * (s.max(0.0) + e.ln_1p() - f64::from(y) * s);
    }
    total
}

struct SortedFeature {
    idx: Vec<usize>,
    values: Vec<f64>,
}

/// Sorted row order per feature; ties keep the canonical row order.
fn presort(set: &WeightedSet) -> Vec<SortedFeature> {
    (0..set.d())
        .map(|f| {
            let mut idx: Vec<usize> = (0..set.n()).collect();
            idx.sort_by(|&a, &b| set.row(a)[f].total_cmp(&set.row(b)[f]).then(a.cmp(&b)));
            let values = idx.iter().map(|&i| set.row(i)[f]).collect();
            SortedFeature { idx, values }
        })
        .collect()
}

fn best_split(order: &[SortedFeature], gh: &[[f64; 2]], min_child_hessian: f64) -> Option<Split> {
    let g_total: f64 = gh.iter().map(|v| v[0]).sum();
    let h_total: f64 = gh.iter().map(|v| v[1]).sum();
    if !(h_total > 0.0) {
        return None;
    }
    // Both children need strictly positive hessian mass.
    let floor = min_child_hessian.max(f64::MIN_POSITIVE);
    let parent = g_total * g_total / h_total;
    let mut best: Option<Split> = None;
    for (f, sorted) in order.iter().enumerate() {
        let mut gl = 0.0;
        let mut hl = 0.0;
        // Best `num / den` so far, compared by cross-multiplication
        // (both denominators are positive) to keep divisions out of the scan.
        let mut best_num = f64::NEG_INFINITY;
        let mut best_den = 1.0;
        let mut at = None;
        for (k, (&i, pair)) in sorted.idx.iter().zip(sorted.values.windows(2)).enumerate() {
            let [g, h] = gh[i];
            gl += g;
            hl += h;
            let gr = g_total - gl;
            let hr = h_total - hl;
            if pair[0] == pair[1] || !(hl >= floor && hr >= floor) {
                continue;
            }
            let num = gl * gl * hr + gr * gr * hl;
            let den = hl * hr;
            if num * best_den > best_num * den {
                best_num = num;
                best_den = den;
                at = Some((k, gl, hl));
            }
        }
        let Some((k, gl, hl)) = at else {
            continue;
        };
        let gr = g_total - gl;
        let hr = h_total - hl;
        let gain = gl * gl / hl + gr * gr / hr - parent;
        if best.as_ref().is_some_and(|b| gain <= b.gain) {
            continue;
        }
        let (a, b) = (sorted.values[k], sorted.values[k + 1]);
        let mut threshold = 0.5 * a + 0.5 * b;
        if threshold <= a {
            // a and b are adjacent floats.
            threshold = b;
        }
        best = Some(Split {
            gain,
            feature: f,
            threshold,
            left: -gl / hl,
            right: -gr / hr,
        });
    }
    best.filter(|s| s.gain > 0.0 && s.left.is_finite() && s.right.is_finite())
}

pub fn train_boosted_stumps(set: &WeightedSet, hp: &Hyperparams) -> Result<Model> {
    if hp.boosting_rounds == 0 {
        return Err(Error::param("boosting_rounds", "must be positive"));
    }
    if !(hp.learning_rate > 0.0 && hp.learning_rate.is_finite()) {
        return Err(Error::param("learning_rate", "must be finite and positive"));
    }
    if set.coefficients().iter().any(|&c| c < 0.0) {
        return Err(Error::param(
            "weights",
            "boosted stumps need nonnegative sample coefficients",
        ));
    }
    let n = set.n();
    let coefs = set.coefficients();
    let pos: f64 = coefs
        .iter()
        .zip(set.labels())
        .filter(|(_, &y)| y == 1)
        .map(|(c, _)| c)
        .sum();
    let p = (pos / set.mass()).clamp(1e-7, 1.0 - 1e-7);
    let base_score = (p / (1.0 - p)).ln();

    let order = presort(set);
    let mut scores = vec![base_score; n];
    let mut probs = vec![0.0; n];
    let mut trial_probs = vec![0.0; n];
    let mut current = objective_and_probs(set, &scores, &mut probs);
    if !current.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let mut history = vec![current];
    let mut stumps = Vec::with_capacity(hp.boosting_rounds);
    let mut gh = vec![[0.0; 2]; n];
    let mut trial = vec![0.0; n];

    for _ in 0..hp.boosting_rounds {
        for i in 0..n {
            let p = probs[i];
            gh[i] = [coefs[i] * (p - f64::from(set.labels()[i])), coefs[i] * p * (1.0 - p)];
        }
        let Some(split) = best_split(&order, &gh, hp.min_child_hessian) else {
            break;
        };
        let mut stump = Stump {
            feature: split.feature,
            threshold: split.threshold,
            left: split.left,
            right: split.right,
        };
        let mut accepted = None;
        for _ in 0..=MAX_STEP_HALVINGS {
            for i in 0..n {
                trial[i] = scores[i] + hp.learning_rate * stump.eval(set.row(i));
            }
            let value = objective_and_probs(set, &trial, &mut trial_probs);
            if value.is_finite() && value <= current {
                accepted = Some(value);
                break;
            }
            stump.left *= 0.5;
            stump.right *= 0.5;
        }
        let Some(value) = accepted else {
            break;
        };
        std::mem::swap(&mut scores, &mut trial);
        std::mem::swap(&mut probs, &mut trial_probs);
        current = value;
        history.push(current);
        stumps.push(stump);
    }

    Ok(Model {
        params: ModelParams::BoostedStumps {
            base_score,
            learning_rate: hp.learning_rate,
            stumps,
        },
        meta: TrainingMeta {
            hyperparams: hp.clone(),
            seed: hp.seed,
            objective: current,
            l2_penalty: 0.0,
            iterations: history.len() - 1,
            converged: true,
            history,
        },
    })
}

/// Blended-objective boosting; `hp.alpha` sets the target share.
pub fn train_weighted_boosted_stumps(
    target: &Dataset,
    source: &Dataset,
    w: &WeightVector,
    hp: &Hyperparams,
) -> Result<Model> {
    hp.validate()?;
    let set = WeightedSet::blend(target, source, &w.values, hp.alpha)?;
    train_boosted_stumps(&set, hp)
}
