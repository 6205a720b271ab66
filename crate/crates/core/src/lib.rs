//! Instance-weighted transfer learning for binary classification.
//!
//! A small labeled target set is combined with a large, shifted source set
//! by weighting each source sample with the sum of a domain weight (a
//! density-ratio estimate from a linear domain discriminator) and a signed
//! task-relevance weight (the margin of a model trained on both sets).

// `!(a < b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod config;
pub mod data;
pub mod density_ratio;
pub mod error;
pub mod io;
pub mod learner;
pub mod metrics;
pub mod optim;
pub mod pipeline;
pub mod rng;
pub mod synth;
pub mod task_relevance;

pub use data::{Dataset, Domain, Hyperparams, Sample, Standardizer};
pub use error::{Error, Result};
pub use learner::{LearnerKind, Model, WeightVector};
pub use pipeline::{BaselineKind, HybridConfig, PipelineSettings};
pub use synth::{synth_shift, ShiftKind, ShiftScenario};
