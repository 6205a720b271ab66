//! Domain-similarity weights `P_T(x) / P_S(x)` for source samples.
//!
//! Two estimators:
//!
//! * [`LinearDiscriminator`]: a logistic classifier separating source
//!   (label 1) from target (label 0). Its odds of "target" are the weight,
//!   `exp(-(x.w + c))`.
//! * [`GaussianDomainModel`]: one multivariate normal per domain; the weight
//!   is the ratio of the two densities, evaluated in log space.
//!
//! Both saturate log-weights to `[-700, 700]` and count how often that
//! happened instead of returning infinities or zeros.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{check_dim, Error, Result};
use crate::learner::{LogisticObjective, WeightedSet};
use crate::optim::{minimize, GdOptions};

/// Bound on `|log w|` before a weight is reported as saturated.
pub const LOG_WEIGHT_LIMIT: f64 = 700.0;

/// One density-ratio evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioWeight {
    pub value: f64,
    pub saturated: bool,
}

impl RatioWeight {
    fn from_log(log_w: f64) -> Self {
        if log_w > LOG_WEIGHT_LIMIT {
            Self {
                value: LOG_WEIGHT_LIMIT.exp(),
                saturated: true,
            }
        } else if log_w < -LOG_WEIGHT_LIMIT {
            Self {
                value: (-LOG_WEIGHT_LIMIT).exp(),
                saturated: true,
            }
        } else {
            Self {
                value: log_w.exp(),
                saturated: false,
            }
        }
    }
}

/// Weights for a whole dataset, in row order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityRatios {
    pub values: Vec<f64>,
    pub saturated: usize,
}

impl FromIterator<RatioWeight> for DensityRatios {
    fn from_iter<I: IntoIterator<Item = RatioWeight>>(iter: I) -> Self {
        let mut values = Vec::new();
        let mut saturated = 0;
        for w in iter {
            saturated += usize::from(w.saturated);
            values.push(w.value);
        }
        Self { values, saturated }
    }
}

/// Source-vs-target logistic classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearDiscriminator {
    pub w_lr: Vec<f64>,
    pub c_lr: f64,
    pub converged: bool,
    pub final_grad_norm: f64,
    pub l2_reg: f64,
    pub balanced: bool,
    /// Per-sample loss coefficient of a source row and of a target row.
    pub sample_coef: (f64, f64),
    /// Total loss coefficient of the source class and of the target class.
    pub class_mass: (f64, f64),
    /// Training loss after each accepted optimizer step.
    #[serde(skip)]
    pub loss_history: Vec<f64>,
}

impl LinearDiscriminator {
    pub fn new(w_lr: Vec<f64>, c_lr: f64) -> Self {
        Self {
            w_lr,
            c_lr,
            converged: true,
            final_grad_norm: 0.0,
            l2_reg: 0.0,
            balanced: false,
            sample_coef: (0.0, 0.0),
            class_mass: (0.0, 0.0),
            loss_history: Vec::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.w_lr.len()
    }

    /// `x.w + c`: log-odds that `x` came from the source domain.
    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.d(), x.len())?;
        Ok(self.w_lr.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.c_lr)
    }
}

/// Fits the discriminator on source (label 1) vs target (label 0).
///
/// With `balance`, each domain carries half of the loss regardless of its
/// size; otherwise every row carries the same coefficient.
pub fn fit_domain_discriminator(
    source: &Dataset,
    target: &Dataset,
    l2_reg: f64,
    balance: bool,
) -> Result<LinearDiscriminator> {
    check_dim(source.d(), target.d())?;
    if !(l2_reg > 0.0 && l2_reg.is_finite()) {
        return Err(Error::param("l2_reg", "discriminator needs a positive ridge penalty"));
    }
    let (ns, nt) = (source.n() as f64, target.n() as f64);
    let (cs, ct) = if balance {
        (0.5 / ns, 0.5 / nt)
    } else {
        (1.0 / (ns + nt), 1.0 / (ns + nt))
    };
    let src = source.with_labels(vec![1; source.n()])?;
    let tgt = target.with_labels(vec![0; target.n()])?;
    let src_coef = vec![cs; source.n()];
    let tgt_coef = vec![ct; target.n()];
    let set = WeightedSet::from_parts(source.d(), &[(&src, &src_coef), (&tgt, &tgt_coef)])?;
    let obj = LogisticObjective::new(&set, l2_reg);
    let opts = GdOptions {
        max_iter: 5_000,
        grad_tol: 1e-8,
        ..Default::default()
    };
    let min = minimize(&obj, vec![0.0; source.d() + 1], opts)?;
    if !min.value.is_finite() {
        return Err(Error::NonFiniteObjective);
    }
    let d = source.d();
    Ok(LinearDiscriminator {
        w_lr: min.params[..d].to_vec(),
        c_lr: min.params[d],
        converged: min.converged,
        final_grad_norm: min.grad_norm,
        l2_reg,
        balanced: balance,
        sample_coef: (cs, ct),
        class_mass: (cs * ns, ct * nt),
        loss_history: min.history,
    })
}

/// `exp(-(x.w + c))`, the discriminator's odds that `x` is a target sample.
pub fn domain_weight(disc: &LinearDiscriminator, x: &[f64]) -> Result<RatioWeight> {
    Ok(RatioWeight::from_log(-disc.logit(x)?))
}

pub fn domain_weights(disc: &LinearDiscriminator, ds: &Dataset) -> Result<DensityRatios> {
    ds.rows().map(|r| domain_weight(disc, r)).collect()
}

/// A fitted normal density with a cached Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
struct Normal {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol_l: DMatrix<f64>,
    half_log_det: f64,
}

impl Normal {
    fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::param("covariance", "matrix is not positive definite"))?;
        let chol_l = chol.l();
        let half_log_det = chol_l.diagonal().iter().map(|v| v.ln()).sum();
        Ok(Self {
            mean,
            cov,
            chol_l,
            half_log_det,
        })
    }

    /// Log density without the `-(d/2) log(2 pi)` constant.
    fn log_density(&self, x: &[f64]) -> f64 {
        let diff = DVector::from_column_slice(x) - &self.mean;
        let z = self
            .chol_l
            .solve_lower_triangular(&diff)
            .expect("cholesky factor has a positive diagonal");
        -0.5 * z.norm_squared() - self.half_log_det
    }
}

/// Per-domain Gaussian fits used for the generative weight.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDomainModel {
    target: Normal,
    source: Normal,
    /// Ridge added to both covariance diagonals; 0 when built from explicit
    /// moments.
    pub ridge_eps: f64,
}

fn moments(ds: &Dataset) -> (DVector<f64>, DMatrix<f64>) {
    let d = ds.d();
    let n = ds.n() as f64;
    let mut mean = DVector::zeros(d);
    for row in ds.rows() {
        mean += DVector::from_column_slice(row);
    }
    mean /= n;
    let mut cov = DMatrix::zeros(d, d);
    for row in ds.rows() {
        let c = DVector::from_column_slice(row) - &mean;
        cov += &c * c.transpose();
    }
    cov /= n;
    // Exact symmetry regardless of accumulation order.
    let cov = (&cov + cov.transpose()) * 0.5;
    (mean, cov)
}

impl GaussianDomainModel {
    pub fn from_moments(mu_t: Vec<f64>, sigma_t: DMatrix<f64>, mu_s: Vec<f64>, sigma_s: DMatrix<f64>) -> Result<Self> {
        let d = mu_t.len();
        check_dim(d, mu_s.len())?;
        for m in [&sigma_t, &sigma_s] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: m.nrows(),
                });
            }
            if (m - m.transpose()).amax() > 1e-10 {
                return Err(Error::param("covariance", "matrix is not symmetric"));
            }
        }
        Ok(Self {
            target: Normal::new(DVector::from_vec(mu_t), sigma_t)?,
            source: Normal::new(DVector::from_vec(mu_s), sigma_s)?,
            ridge_eps: 0.0,
        })
    }

    pub fn d(&self) -> usize {
        self.target.mean.len()
    }

    pub fn mu_t(&self) -> &[f64] {
        self.target.mean.as_slice()
    }

    pub fn mu_s(&self) -> &[f64] {
        self.source.mean.as_slice()
    }

    pub fn sigma_t(&self) -> &DMatrix<f64> {
        &self.target.cov
    }

    pub fn sigma_s(&self) -> &DMatrix<f64> {
        &self.source.cov
    }

    /// `log N(x; mu_T, Sigma_T) - log N(x; mu_S, Sigma_S)`.
    pub fn log_ratio(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.d(), x.len())?;
        Ok(self.target.log_density(x) - self.source.log_density(x))
    }
}

/// Sample means and population covariances (denominator `n`) of each
/// domain, with `ridge_eps` added to both diagonals.
pub fn fit_gaussian_model(source: &Dataset, target: &Dataset, ridge_eps: f64) -> Result<GaussianDomainModel> {
    check_dim(source.d(), target.d())?;
    if !(ridge_eps > 0.0 && ridge_eps.is_finite()) {
        return Err(Error::param("ridge_eps", "must be finite and positive"));
    }
    let d = source.d();
    let ridge = DMatrix::identity(d, d) * ridge_eps;
    let (mu_t, cov_t) = moments(target);
    let (mu_s, cov_s) = moments(source);
    Ok(GaussianDomainModel {
        target: Normal::new(mu_t, cov_t + &ridge)?,
        source: Normal::new(mu_s, cov_s + &ridge)?,
        ridge_eps,
    })
}

pub fn gaussian_weight(model: &GaussianDomainModel, x: &[f64]) -> Result<RatioWeight> {
    Ok(RatioWeight::from_log(model.log_ratio(x)?))
}

pub fn gaussian_weights(model: &GaussianDomainModel, ds: &Dataset) -> Result<DensityRatios> {
    ds.rows().map(|r| gaussian_weight(model, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Domain, Sample};

    fn one_d(domain: Domain, xs: &[f64]) -> Dataset {
        Dataset::from_samples(domain, xs.iter().map(|&x| Sample::new(vec![x], 0)).collect()).unwrap()
    }

    #[test]
    fn uninformative_discriminator_gives_unit_weights() {
        let disc = LinearDiscriminator::new(vec![0.0, 0.0], 0.0);
        for x in [[0.0, 0.0], [3.0, -7.0], [1e3, 1e-3]] {
            let w = domain_weight(&disc, &x).unwrap();
            assert_eq!(w.value, 1.0);
            assert!(!w.saturated);
        }
    }

    #[test]
    fn discriminator_weight_closed_form() {
        let disc = LinearDiscriminator::new(vec![1.0], 0.0);
        assert_eq!(domain_weight(&disc, &[0.0]).unwrap().value, 1.0);
        let e = domain_weight(&disc, &[-1.0]).unwrap().value;
        assert!((e - std::f64::consts::E).abs() < 1e-15);
        assert!(domain_weight(&disc, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn bayes_discriminator_matches_gaussian_ratio() {
        // log P(source|x)/P(target|x) for N(0,1) vs N(1,1) is 0.5 - x.
        let disc = LinearDiscriminator::new(vec![-1.0], 0.5);
        for x in [0.0, 0.5, 2.0] {
            let got = domain_weight(&disc, &[x]).unwrap().value;
            let p_t = (-(x - 1.0) * (x - 1.0) / 2.0).exp();
            let p_s = (-x * x / 2.0).exp();
            assert!((got - p_t / p_s).abs() <= 1e-12 * (p_t / p_s), "x={x}");
        }
    }

    #[test]
    fn saturation_is_flagged() {
        let disc = LinearDiscriminator::new(vec![-1.0], 0.0);
        let hi = domain_weight(&disc, &[1e4]).unwrap();
        assert!(hi.saturated && hi.value.is_finite() && hi.value > 1e300);
        let lo = domain_weight(&disc, &[-1e4]).unwrap();
        assert!(lo.saturated && lo.value > 0.0);
        let batch = domain_weights(&disc, &one_d(Domain::Source, &[0.0, 1e4, -1e4])).unwrap();
        assert_eq!(batch.saturated, 2);
    }

    #[test]
    fn single_target_sample_with_balance() {
        let source = one_d(
            Domain::Source,
            &(0..1000).map(|i| (i as f64 / 100.0).sin()).collect::<Vec<_>>(),
        );
        let target = one_d(Domain::Target, &[0.3]);
        let disc = fit_domain_discriminator(&source, &target, 1e-2, true).unwrap();
        assert!(disc.w_lr.iter().all(|v| v.is_finite()) && disc.c_lr.is_finite());
        let (cs, ct) = disc.sample_coef;
        assert!((ct / cs - 1000.0).abs() < 1e-9);
        assert!((disc.class_mass.0 - disc.class_mass.1).abs() < 1e-12);
    }

    #[test]
    fn discriminator_errors() {
        let s = one_d(Domain::Source, &[0.0]);
        let t = Dataset::from_samples(Domain::Target, vec![Sample::new(vec![0.0, 1.0], 0)]).unwrap();
        assert!(matches!(
            fit_domain_discriminator(&s, &t, 1.0, true),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(fit_domain_discriminator(&s, &one_d(Domain::Target, &[1.0]), 0.0, true).is_err());
    }

    #[test]
    fn gaussian_degenerate_moments() {
        let model = fit_gaussian_model(
            &one_d(Domain::Source, &[0.0, 2.0]),
            &one_d(Domain::Target, &[4.0]),
            1e-3,
        )
        .unwrap();
        assert_eq!(model.mu_s(), &[1.0]);
        assert_eq!(model.sigma_s()[(0, 0)], 1.0 + 1e-3);
        assert_eq!(model.mu_t(), &[4.0]);
        assert_eq!(model.sigma_t()[(0, 0)], 1e-3);
    }

    #[test]
    fn gaussian_ratio_closed_form() {
        let one = DMatrix::from_element(1, 1, 1.0);
        let m = GaussianDomainModel::from_moments(vec![1.0], one.clone(), vec![0.0], one).unwrap();
        assert_eq!(gaussian_weight(&m, &[0.5]).unwrap().value, 1.0);
        let e = gaussian_weight(&m, &[1.5]).unwrap().value;
        assert!((e - std::f64::consts::E).abs() <= 1e-12 * std::f64::consts::E);
    }

    #[test]
    fn identical_gaussians_give_exactly_one() {
        let cov = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5]);
        let m = GaussianDomainModel::from_moments(vec![0.2, -1.0], cov.clone(), vec![0.2, -1.0], cov).unwrap();
        for x in [[0.0, 0.0], [5.0, -3.0], [0.2, -1.0]] {
            assert_eq!(gaussian_weight(&m, &x).unwrap().value, 1.0);
        }
    }

    #[test]
    fn rejects_bad_covariance() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let ok = DMatrix::identity(2, 2);
        assert!(GaussianDomainModel::from_moments(vec![0.0; 2], bad, vec![0.0; 2], ok.clone()).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(GaussianDomainModel::from_moments(vec![0.0; 2], asym, vec![0.0; 2], ok).is_err());
    }
}
