//! Weighted L2-regularized logistic regression.

use crate::data::{Dataset, Hyperparams};
use crate::error::{Error, Result};
use crate::optim::{minimize, GdOptions, Objective};

use super::{log_loss, sigmoid, Model, ModelParams, TrainingMeta, WeightVector, WeightedSet};

/// `sum_i c_i * logloss(y_i, x_i.w + b) + (l2 / 2) * mass * |w|^2` over the
/// parameter vector `[w_0, .., w_{d-1}, b]`. The intercept is not
/// penalized. Scaling the penalty by the set's coefficient mass makes the
/// minimizer that of the weighted-mean loss plus `(l2 / 2) |w|^2`.
pub struct LogisticObjective<'a> {
    set: &'a WeightedSet,
    l2: f64,
}

impl<'a> LogisticObjective<'a> {
    pub fn new(set: &'a WeightedSet, l2: f64) -> Self {
        Self { set, l2 }
    }

    pub fn penalty(&self, params: &[f64]) -> f64 {
        let d = self.set.d();
        0.5 * self.l2 * self.set.mass() * params[..d].iter().map(|v| v * v).sum::<f64>()
    }
}

impl Objective for LogisticObjective<'_> {
    fn dim(&self) -> usize {
        self.set.d() + 1
    }

    fn value_grad(&self, params: &[f64], grad: &mut [f64]) -> f64 {
        let d = self.set.d();
        let (w, b) = (&params[..d], params[d]);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut value = 0.0;
        for i in 0..self.set.n() {
            let row = self.set.row(i);
            let y = self.set.labels()[i];
            let c = self.set.coefficients()[i];
            let z = row.iter().zip(w).map(|(x, wk)| x * wk).sum::<f64>() + b;
            value += c * log_loss(z, y);
            let r = c * (sigmoid(z) - f64::from(y));
            for (g, x) in grad[..d].iter_mut().zip(row) {
                *g += r * x;
            }
            grad[d] += r;
        }
        let lm = self.l2 * self.set.mass();
        for (g, wk) in grad[..d].iter_mut().zip(w) {
            *g += lm * wk;
        }
        value + self.penalty(params)
    }
}

/// Deterministic full-batch fit from the zero vector.
pub fn train_logreg(set: &WeightedSet, hp: &Hyperparams) -> Result<Model> {
    if !(hp.l2_reg >= 0.0 && hp.l2_reg.is_finite()) {
        return Err(Error::param("l2_reg", "must be finite and nonnegative"));
    }
    let obj = LogisticObjective::new(set, hp.l2_reg);
    let opts = GdOptions {
        max_iter: 10_000,
        grad_tol: 1e-8,
        ..Default::default()
    };
    let min = minimize(&obj, vec![0.0; set.d() + 1], opts)?;
    let d = set.d();
    let l2_penalty = obj.penalty(&min.params);
    let weights = min.params[..d].to_vec();
    let intercept = min.params[d];
    Ok(Model {
        params: ModelParams::LogReg { weights, intercept },
        meta: TrainingMeta {
            hyperparams: hp.clone(),
            seed: hp.seed,
            objective: min.value,
            l2_penalty,
            iterations: min.iterations,
            converged: min.converged,
            history: min.history,
        },
    })
}

/// Blended-objective logistic regression; `hp.alpha` sets the target share.
pub fn train_weighted_logreg(target: &Dataset, source: &Dataset, w: &WeightVector, hp: &Hyperparams) -> Result<Model> {
    hp.validate()?;
    let set = WeightedSet::blend(target, source, &w.values, hp.alpha)?;
    train_logreg(&set, hp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Domain, Sample};

    fn toy() -> (Dataset, Dataset) {
        let t = Dataset::from_samples(
            Domain::Target,
            vec![
                Sample::new(vec![0.0, 1.0], 1),
                Sample::new(vec![1.0, -0.5], 0),
                Sample::new(vec![0.3, 0.2], 1),
                Sample::new(vec![-0.7, -0.1], 0),
            ],
        )
        .unwrap();
        let s = Dataset::from_samples(
            Domain::Source,
            vec![
                Sample::new(vec![2.0, 1.0], 1),
                Sample::new(vec![-1.0, 0.5], 0),
                Sample::new(vec![0.4, -0.3], 0),
            ],
        )
        .unwrap();
        (t, s)
    }

    #[test]
    fn converges_with_ridge() {
        let (t, s) = toy();
        let m = train_weighted_logreg(&t, &s, &WeightVector::ones(3), &Hyperparams::default()).unwrap();
        assert!(m.meta.converged);
        assert!(m.meta.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn alpha_one_equals_target_only() {
        let (t, s) = toy();
        let hp = Hyperparams::default().with_alpha(1.0);
        let w = WeightVector::unclipped(vec![5.0, 0.1, 2.0], super::super::Provenance::Custom).unwrap();
        let a = train_weighted_logreg(&t, &s, &w, &hp).unwrap();
        let b = super::super::train_unweighted(crate::learner::LearnerKind::LogReg, &[&t], &hp).unwrap();
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn zero_weights_equal_target_only() {
        let (t, s) = toy();
        let hp = Hyperparams::default().with_alpha(0.5);
        let w = WeightVector::unclipped(vec![0.0; 3], super::super::Provenance::Custom).unwrap();
        let a = train_weighted_logreg(&t, &s, &w, &hp).unwrap();
        let b = super::super::train_unweighted(crate::learner::LearnerKind::LogReg, &[&t], &hp).unwrap();
        assert_eq!(a.params, b.params);
    }
}
