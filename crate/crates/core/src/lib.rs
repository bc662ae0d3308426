//! Simulation-based power analysis for evaluation datasets with several
//! rater responses per item.
//!
//! An evaluation set is a [`ResponseMatrix`]: `N` items, each holding an
//! unordered collection of responses in `[0, 1]`. The crate simulates gold
//! matrices together with an ideal model `A` and a location-perturbed model
//! `B`, scores them with item-level comparison metrics, and estimates the
//! expected one-sided p-value of the comparison with a multistage bootstrap.
//! Classical paired baselines and a grid-search prior fitter round it out.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution is
//! injected through [`Executor`]; every resample draws from a random stream
//! derived from `(seed, arm, index)`, so results never depend on scheduling.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod distributions;
mod error;
pub mod exec;
pub mod fitting;
pub mod inference;
mod matrix;
pub mod metrics;
pub mod power;
pub mod rng;
pub mod simulator;
pub mod special;
mod stats;

pub use distributions::{DistributionSpec, Family};
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use inference::{
    estimate_p_value, run_experiment, run_experiment_on, Direction, ExperimentConfig,
    ExperimentMode, PValue, PValueReport, SamplingMode, SamplingStrategy,
};
pub use matrix::{ResponseMatrix, Triple};
pub use metrics::{MetricId, MetricResult};
pub use rng::{RandomState, StreamKey};
pub use simulator::{ItemParams, ItemPrior, ResponseFamily};
