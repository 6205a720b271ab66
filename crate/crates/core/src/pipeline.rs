//! Baselines and the hybrid weighting pipeline.
//!
//! | baseline     | training                                                 |
//! |--------------|----------------------------------------------------------|
//! | `TargetOnly` | unweighted, target rows only                             |
//! | `SourceOnly` | unweighted, source rows only                             |
//! | `Union`      | unweighted, pooled                                       |
//! | `AllOnes`    | blended objective, `w = 1`                               |
//! | `Gaussian`   | blended objective, Gaussian density-ratio weights        |
//! | `Hybrid`     | blended objective, `w_domain + w_task`                   |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Hyperparams};
use crate::density_ratio::{domain_weights, fit_domain_discriminator, fit_gaussian_model, gaussian_weights};
use crate::error::{check_dim, Error, Result};
use crate::learner::{self, LearnerKind, Model, Provenance, WeightVector};
use crate::metrics::{evaluate, Metrics};
use crate::rng::stream;
use crate::task_relevance::{fit_union_model, task_weights_for_source};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    TargetOnly,
    SourceOnly,
    Union,
    AllOnes,
    Gaussian,
    Hybrid,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 6] = [
        BaselineKind::TargetOnly,
        BaselineKind::SourceOnly,
        BaselineKind::Union,
        BaselineKind::AllOnes,
        BaselineKind::Gaussian,
        BaselineKind::Hybrid,
    ];

    /// Whether the baseline trains on the blended objective and so has an
    /// `alpha` to choose.
    pub fn is_weighted(self) -> bool {
        matches!(
            self,
            BaselineKind::AllOnes | BaselineKind::Gaussian | BaselineKind::Hybrid
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BaselineKind::TargetOnly => "target-only",
            BaselineKind::SourceOnly => "source-only",
            BaselineKind::Union => "union",
            BaselineKind::AllOnes => "all-ones",
            BaselineKind::Gaussian => "gaussian",
            BaselineKind::Hybrid => "hybrid",
        }
    }
}

impl std::fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativePolicy {
    ClampZero,
    Allow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombineScale {
    RawSum,
    /// Each vector divided by its mean magnitude before summing.
    StandardizedSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HybridConfig {
    pub clip_max: f64,
    pub negative_policy: NegativePolicy,
    pub combine_scale: CombineScale,
    /// Reweight the discriminator's loss so both domains weigh the same.
    pub balance: bool,
    pub discriminator_l2: f64,
}

impl Default for HybridConfig {
    fn default() -> Self {
        Self {
            clip_max: 10.0,
            negative_policy: NegativePolicy::ClampZero,
            combine_scale: CombineScale::RawSum,
            balance: true,
            discriminator_l2: 1e-2,
        }
    }
}

impl HybridConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.clip_max >= 1.0 && self.clip_max.is_finite()) {
            return Err(Error::param("clip_max", "must be finite and at least 1"));
        }
        if !(self.discriminator_l2 > 0.0 && self.discriminator_l2.is_finite()) {
            return Err(Error::param("discriminator_l2", "must be finite and positive"));
        }
        Ok(())
    }
}

/// Everything a baseline needs besides the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSettings {
    pub learner: LearnerKind,
    pub hyperparams: Hyperparams,
    pub hybrid: HybridConfig,
    /// Covariance ridge for the Gaussian baseline.
    pub ridge_eps: f64,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        Self {
            learner: LearnerKind::BoostedStumps,
            hyperparams: Hyperparams::default(),
            hybrid: HybridConfig::default(),
            ridge_eps: 1e-3,
        }
    }
}

impl PipelineSettings {
    pub fn validate(&self) -> Result<()> {
        self.hyperparams.validate()?;
        self.hybrid.validate()?;
        if !(self.ridge_eps > 0.0 && self.ridge_eps.is_finite()) {
            return Err(Error::param("ridge_eps", "must be finite and positive"));
        }
        Ok(())
    }
}

/// Shape of a source weight vector, for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSummary {
    pub provenance: Provenance,
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    /// Share of entries capped at the clip bound.
    pub fraction_clipped: f64,
    /// Share of entries raised from a negative value to zero.
    pub fraction_clamped: f64,
    /// Density ratios whose log exceeded the saturation bound.
    pub saturated: usize,
    /// Share of source samples the union model misclassified (hybrid only).
    pub fraction_negative_task: Option<f64>,
    pub union_model_id: Option<String>,
    pub margin_kind: Option<String>,
    pub combine_scale: Option<CombineScale>,
    pub negative_policy: Option<NegativePolicy>,
}

impl WeightSummary {
    pub fn of(w: &WeightVector, clipped: usize, clamped: usize, saturated: usize) -> Self {
        let n = w.values.len().max(1) as f64;
        Self {
            provenance: w.provenance,
            min: w.values.iter().copied().fold(f64::INFINITY, f64::min),
            mean: w.values.iter().sum::<f64>() / n,
            max: w.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            fraction_clipped: clipped as f64 / n,
            fraction_clamped: clamped as f64 / n,
            saturated,
            fraction_negative_task: None,
            union_model_id: None,
            margin_kind: None,
            combine_scale: None,
            negative_policy: None,
        }
    }
}

/// Output of [`hybrid_weights`] with clamp/clip counts.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridWeights {
    pub weights: WeightVector,
    pub clipped: usize,
    pub clamped: usize,
}

fn mean_magnitude(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum::<f64>() / v.len() as f64
}

/// Elementwise `w_domain + w_task`, then the negative policy, then the cap
/// at `clip_max`.
pub fn hybrid_weights(domain_w: &[f64], task_w: &[f64], cfg: &HybridConfig) -> Result<HybridWeights> {
    if domain_w.len() != task_w.len() {
        return Err(Error::LengthMismatch {
            what: "task weights",
            expected: domain_w.len(),
            actual: task_w.len(),
        });
    }
    cfg.validate()?;
    if domain_w.iter().chain(task_w).any(|v| !v.is_finite()) {
        return Err(Error::InvalidSample("hybrid weight inputs must be finite".into()));
    }
    if domain_w.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidSample("domain weights must be strictly positive".into()));
    }
    let (ds, ts) = match cfg.combine_scale {
        CombineScale::RawSum => (1.0, 1.0),
        CombineScale::StandardizedSum => {
            let dm = mean_magnitude(domain_w);
            let tm = mean_magnitude(task_w);
            (1.0 / dm, if tm > 0.0 { 1.0 / tm } else { 1.0 })
        }
    };
    let mut clipped = 0;
    let mut clamped = 0;
    let values = domain_w
        .iter()
        .zip(task_w)
        .map(|(d, t)| {
            let mut w = d * ds + t * ts;
            if w < 0.0 && cfg.negative_policy == NegativePolicy::ClampZero {
                clamped += 1;
                w = 0.0;
            }
            if w > cfg.clip_max {
                clipped += 1;
                w = cfg.clip_max;
            }
            w
        })
        .collect();
    Ok(HybridWeights {
        weights: WeightVector::unclipped(values, Provenance::Hybrid)?,
        clipped,
        clamped,
    })
}

/// Source weights for a weighted baseline. They do not depend on alpha.
pub fn source_weights(
    kind: BaselineKind,
    source: &Dataset,
    target: &Dataset,
    settings: &PipelineSettings,
) -> Result<(WeightVector, WeightSummary)> {
    check_dim(target.d(), source.d())?;
    match kind {
        BaselineKind::AllOnes => {
            let w = WeightVector::ones(source.n());
            let summary = WeightSummary::of(&w, 0, 0, 0);
            Ok((w, summary))
        }
        BaselineKind::Gaussian => {
            let model = fit_gaussian_model(source, target, settings.ridge_eps)?;
            let ratios = gaussian_weights(&model, source)?;
            let clip = settings.hyperparams.weight_clip_max;
            let clipped = ratios.values.iter().filter(|&&v| v > clip).count();
            let w = WeightVector::clipped(ratios.values, clip, Provenance::Gaussian)?;
            let summary = WeightSummary::of(&w, clipped, 0, ratios.saturated);
            Ok((w, summary))
        }
        BaselineKind::Hybrid => {
            let cfg = &settings.hybrid;
            let disc = fit_domain_discriminator(source, target, cfg.discriminator_l2, cfg.balance)?;
            let domain = domain_weights(&disc, source)?;
            let union = fit_union_model(source, target, &settings.hyperparams, settings.learner)?;
            let task = task_weights_for_source(&union, source)?;
            let hw = hybrid_weights(&domain.values, &task.weights, cfg)?;
            let mut summary = WeightSummary::of(&hw.weights, hw.clipped, hw.clamped, domain.saturated);
            summary.fraction_negative_task = Some(task.fraction_negative);
            summary.union_model_id = Some(task.union_model_id);
            summary.margin_kind = Some(task.margin_kind);
            summary.combine_scale = Some(cfg.combine_scale);
            summary.negative_policy = Some(cfg.negative_policy);
            Ok((hw.weights, summary))
        }
        other => Err(Error::param("baseline", format!("{other} does not use source weights"))),
    }
}

/// A trained baseline and, for weighted kinds, its weights.
#[derive(Debug, Clone)]
pub struct BaselineFit {
    pub kind: BaselineKind,
    pub model: Model,
    pub weights: Option<(WeightVector, WeightSummary)>,
}

/// Trains one baseline. Weighted kinds use `settings.hyperparams.alpha`.
pub fn build_baseline(
    kind: BaselineKind,
    source: &Dataset,
    target: &Dataset,
    settings: &PipelineSettings,
) -> Result<BaselineFit> {
    settings.validate()?;
    let hp = &settings.hyperparams;
    let (model, weights) = match kind {
        BaselineKind::TargetOnly => (learner::train_unweighted(settings.learner, &[target], hp)?, None),
        BaselineKind::SourceOnly => (learner::train_unweighted(settings.learner, &[source], hp)?, None),
        BaselineKind::Union => (fit_union_model(source, target, hp, settings.learner)?, None),
        weighted => {
            let (w, summary) = source_weights(weighted, source, target, settings)?;
            let model = learner::train_weighted(settings.learner, target, source, &w, hp)?;
            (model, Some((w, summary)))
        }
    };
    Ok(BaselineFit { kind, model, weights })
}

/// Trains a weighted baseline with precomputed weights.
pub fn train_with_weights(
    source: &Dataset,
    target: &Dataset,
    w: &WeightVector,
    alpha: f64,
    settings: &PipelineSettings,
) -> Result<Model> {
    learner::train_weighted(
        settings.learner,
        target,
        source,
        w,
        &settings.hyperparams.with_alpha(alpha),
    )
}

/// Target-set folds with each class spread round-robin over the folds.
pub fn stratified_folds(target: &Dataset, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::param("folds", "need at least 2 folds"));
    }
    if k > target.n() {
        return Err(Error::param("folds", format!("{k} folds for {} samples", target.n())));
    }
    for class in [1u8, 0] {
        if !target.labels().contains(&class) {
            return Err(Error::ClassAbsent { class });
        }
    }
    let mut rng = stream(seed, "cv-folds", 0);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for class in [1u8, 0] {
        let mut members: Vec<usize> = (0..target.n()).filter(|&i| target.label(i) == class).collect();
        rand::seq::SliceRandom::shuffle(members.as_mut_slice(), &mut rng);
        for i in members {
            folds[next % k].push(i);
            next += 1;
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSelection {
    pub alpha: f64,
    pub grid: Vec<f64>,
    /// `fold_scores[g][f]`: validation macro-F1 of grid point `g` on fold `f`.
    pub fold_scores: Vec<Vec<f64>>,
    pub mean_scores: Vec<f64>,
}

/// Grid index with the highest score; ties go to the larger alpha.
pub fn argmax_alpha(grid: &[f64], scores: &[f64]) -> usize {
    let mut best = 0;
    for g in 1..grid.len() {
        if scores[g] > scores[best] || (scores[g] == scores[best] && grid[g] > grid[best]) {
            best = g;
        }
    }
    best
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param("grid", "alpha grid is empty"));
    }
    if grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::param("grid", "alpha values must lie in [0, 1]"));
    }
    Ok(())
}

/// Picks alpha for a weighted baseline by stratified k-fold cross-validation
/// on the target training set. Weights are refit on each fold's training
/// part; validation uses only held-out target rows.
pub fn select_alpha(
    kind: BaselineKind,
    source: &Dataset,
    target_train: &Dataset,
    grid: &[f64],
    folds: usize,
    settings: &PipelineSettings,
) -> Result<AlphaSelection> {
    check_grid(grid)?;
    if !kind.is_weighted() {
        return Err(Error::param("baseline", format!("{kind} has no alpha")));
    }
    settings.validate()?;
    if grid.len() == 1 {
        return Ok(AlphaSelection {
            alpha: grid[0],
            grid: grid.to_vec(),
            fold_scores: vec![vec![]],
            mean_scores: vec![f64::NAN],
        });
    }
    let fold_idx = stratified_folds(target_train, folds, settings.hyperparams.seed)?;
    let per_fold: Vec<Vec<f64>> = fold_idx
        .par_iter()
        .map(|holdout| -> Result<Vec<f64>> {
            let train_idx: Vec<usize> = (0..target_train.n())
                .filter(|i| holdout.binary_search(i).is_err())
                .collect();
            let train = target_train.subset(&train_idx)?;
            let valid = target_train.subset(holdout)?;
            let (w, _) = source_weights(kind, source, &train, settings)?;
            grid.iter()
                .map(|&alpha| {
                    let model = train_with_weights(source, &train, &w, alpha, settings)?;
                    Ok(evaluate(&model, &valid)?.macro_f1)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let fold_scores: Vec<Vec<f64>> = (0..grid.len())
        .map(|g| per_fold.iter().map(|f| f[g]).collect())
        .collect();
    let mean_scores: Vec<f64> = fold_scores
        .iter()
        .map(|s| s.iter().sum::<f64>() / s.len() as f64)
        .collect();
    let best = argmax_alpha(grid, &mean_scores);
    Ok(AlphaSelection {
        alpha: grid[best],
        grid: grid.to_vec(),
        fold_scores,
        mean_scores,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub metrics: Metrics,
}

/// Trains and evaluates `kind` at every alpha of an ascending grid, reusing
/// one set of source weights.
pub fn alpha_sweep(
    kind: BaselineKind,
    source: &Dataset,
    target_train: &Dataset,
    target_test: &Dataset,
    grid: &[f64],
    settings: &PipelineSettings,
) -> Result<Vec<SweepPoint>> {
    check_grid(grid)?;
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param("grid", "alpha grid must be strictly ascending"));
    }
    settings.validate()?;
    let (w, _) = source_weights(kind, source, target_train, settings)?;
    grid.par_iter()
        .map(|&alpha| {
            let model = train_with_weights(source, target_train, &w, alpha, settings)?;
            Ok(SweepPoint {
                alpha,
                metrics: evaluate(&model, target_test)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Domain, Sample};

    #[test]
    fn neutral_task_term() {
        let hw = hybrid_weights(&[1.0, 1.0], &[0.0, 0.0], &HybridConfig::default()).unwrap();
        assert_eq!(hw.weights.values, vec![1.0, 1.0]);
        assert_eq!(hw.weights.provenance, Provenance::Hybrid);
    }

    #[test]
    fn clamp_and_clip() {
        let cfg = HybridConfig::default();
        let hw = hybrid_weights(&[0.5], &[-2.0], &cfg).unwrap();
        assert_eq!(hw.weights.values, vec![0.0]);
        assert_eq!(hw.clamped, 1);
        let hw = hybrid_weights(&[20.0], &[5.0], &cfg).unwrap();
        assert_eq!(hw.weights.values, vec![10.0]);
        assert_eq!(hw.clipped, 1);
        let allow = HybridConfig {
            negative_policy: NegativePolicy::Allow,
            ..cfg
        };
        assert_eq!(
            hybrid_weights(&[0.5], &[-2.0], &allow).unwrap().weights.values,
            vec![-1.5]
        );
    }

    #[test]
    fn standardized_sum_gives_unit_mean_parts() {
        let cfg = HybridConfig {
            combine_scale: CombineScale::StandardizedSum,
            clip_max: 100.0,
            ..Default::default()
        };
        let hw = hybrid_weights(&[2.0, 6.0], &[1.0, 3.0], &cfg).unwrap();
        assert_eq!(hw.weights.values, vec![1.0, 3.0]);
    }

    #[test]
    fn hybrid_input_errors() {
        let cfg = HybridConfig::default();
        assert!(hybrid_weights(&[1.0], &[1.0, 2.0], &cfg).is_err());
        assert!(hybrid_weights(&[0.0], &[1.0], &cfg).is_err());
        assert!(hybrid_weights(&[1.0], &[f64::NAN], &cfg).is_err());
    }

    #[test]
    fn singleton_grid() {
        let t = Dataset::from_samples(Domain::Target, vec![Sample::new(vec![0.0], 1)]).unwrap();
        let s = t.with_domain(Domain::Source);
        let sel = select_alpha(BaselineKind::Hybrid, &s, &t, &[0.5], 5, &PipelineSettings::default()).unwrap();
        assert_eq!(sel.alpha, 0.5);
    }

    #[test]
    fn tie_goes_to_larger_alpha() {
        assert_eq!(argmax_alpha(&[0.1, 0.5, 0.9], &[0.7, 0.7, 0.7]), 2);
        assert_eq!(argmax_alpha(&[0.1, 0.5, 0.9], &[0.7, 0.8, 0.7]), 1);
    }

    #[test]
    fn folds_need_both_classes() {
        let t = Dataset::from_samples(
            Domain::Target,
            (0..10).map(|i| Sample::new(vec![i as f64], 0)).collect(),
        )
        .unwrap();
        assert!(matches!(
            stratified_folds(&t, 2, 0),
            Err(Error::ClassAbsent { class: 1 })
        ));
    }

    #[test]
    fn folds_are_stratified_partition() {
        let t = Dataset::from_samples(
            Domain::Target,
            (0..23)
                .map(|i| Sample::new(vec![i as f64], u8::from(i % 5 == 0)))
                .collect(),
        )
        .unwrap();
        let folds = stratified_folds(&t, 5, 3).unwrap();
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        for f in &folds {
            assert_eq!(f.iter().filter(|&&i| t.label(i) == 1).count(), 1);
        }
    }

    #[test]
    fn unsorted_sweep_grid_rejected() {
        let t = Dataset::from_samples(Domain::Target, vec![Sample::new(vec![0.0], 1)]).unwrap();
        let s = t.with_domain(Domain::Source);
        let err = alpha_sweep(
            BaselineKind::AllOnes,
            &s,
            &t,
            &t,
            &[0.5, 0.1],
            &PipelineSettings::default(),
        );
        assert!(err.is_err());
    }
}
