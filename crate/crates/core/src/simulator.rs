//! Two-stage response generator.
//!
//! Stage one draws per-item parameters `(mu_i, sigma_i)` from an
//! [`ItemPrior`]; stage two draws each item's responses from a normal
//! censored to `[0, 1]`, optionally snapped onto a discrete level grid.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::distributions::{Clip, DistributionSpec};
use crate::error::{Error, Result};
use crate::inference::ExperimentConfig;
use crate::matrix::{ResponseMatrix, Triple};

/// Distributions over per-item location and scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ItemPrior {
    #[serde(rename = "location_spec")]
    pub location: DistributionSpec,
    #[serde(rename = "scale_spec")]
    pub scale: DistributionSpec,
}

impl ItemPrior {
    pub fn new(location: DistributionSpec, scale: DistributionSpec) -> Self {
        ItemPrior { location, scale }
    }

    /// `mu ~ U(0, 1)`, `sigma ~ U(0, 0.3)`.
    pub fn default_synthetic() -> Self {
        ItemPrior::new(
            DistributionSpec::uniform(0.0, 1.0),
            DistributionSpec::uniform(0.0, 0.3),
        )
    }

    /// Stanford Toxicity fit: clipped folded normal means, triangular stds
    /// clamped at zero.
    pub fn toxicity() -> Self {
        ItemPrior::new(
            DistributionSpec::folded_normal(0.19, 0.11).clipped(0.0, 1.0),
            DistributionSpec::triangular(-0.05, 0.21, 0.45).clipped(0.0, f64::INFINITY),
        )
    }

    /// MultiDomain Agreement fit: truncated normals on `[0, 1]`.
    pub fn multidomain() -> Self {
        ItemPrior::new(
            DistributionSpec::truncated_normal(-0.5, 1.0, 0.0, 1.0),
            DistributionSpec::truncated_normal(-0.3923, 0.8502, 0.0, 1.0),
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.location.validate()?;
        self.scale.validate()?;
        if self.scale.support_min() < 0.0 {
            return Err(Error::param(
                "scale_spec",
                "scale distribution must be supported on [0, inf)",
            ));
        }
        Ok(())
    }
}

/// Per-item `(mu_i, sigma_i)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemParams {
    pub entries: Vec<(f64, f64)>,
}

impl ItemParams {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Response domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ResponseFamily {
    /// Normal censored to `[0, 1]`.
    #[default]
    ContinuousCensoredNormal,
    /// Censored normal snapped onto `{0, 1/(levels-1), ..., 1}`.
    DiscreteLevels { levels: u32 },
}

impl ResponseFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ResponseFamily::DiscreteLevels { levels } if levels < 2 => {
                Err(Error::param("levels", "need at least 2 levels"))
            }
            _ => Ok(()),
        }
    }

    /// Maps a value in `[0, 1]` into the response domain. Exact midpoints go up.
    #[inline]
    pub fn snap(&self, x: f64) -> f64 {
        match *self {
            ResponseFamily::ContinuousCensoredNormal => x,
            ResponseFamily::DiscreteLevels { levels } => {
                let steps = (levels - 1) as f64;
                libm::floor(x * steps + 0.5) / steps
            }
        }
    }
}

/// Item ids `item-0 .. item-{n-1}`.
pub fn item_ids(n: usize) -> Arc<[String]> {
    (0..n).map(|i| format!("item-{i}")).collect::<Vec<_>>().into()
}

/// Draws `n` independent `(mu_i, sigma_i)` pairs.
pub fn draw_item_params<R: Rng + ?Sized>(
    prior: &ItemPrior,
    n: usize,
    rng: &mut R,
) -> Result<ItemParams> {
    if n == 0 {
        return Err(Error::config("need at least one item"));
    }
    prior.validate()?;
    let entries = (0..n)
        .map(|_| {
            let mu = prior.location.sample_one(rng);
            let sigma = prior.scale.sample_one(rng).max(0.0);
            (mu, sigma)
        })
        .collect();
    Ok(ItemParams { entries })
}

/// Shifts every location by an independent `U(-epsilon, epsilon)` draw.
pub fn perturb_params<R: Rng + ?Sized>(params: &ItemParams, epsilon: f64, rng: &mut R) -> ItemParams {
    if epsilon == 0.0 {
        return params.clone();
    }
    let entries = params
        .entries
        .iter()
        .map(|&(mu, sigma)| {
            let delta = epsilon * (2.0 * rng.random::<f64>() - 1.0);
            (mu + delta, sigma)
        })
        .collect();
    ItemParams { entries }
}

/// `k` censored-normal responses per item, ids `item-0..`.
pub fn generate_matrix<R: Rng + ?Sized>(
    params: &ItemParams,
    k: usize,
    family: ResponseFamily,
    rng: &mut R,
) -> Result<ResponseMatrix> {
    if k == 0 {
        return Err(Error::config("need at least one response per item"));
    }
    family.validate()?;
    Ok(generate_matrix_with_ids(
        item_ids(params.len()),
        params,
        k,
        family,
        rng,
    ))
}

pub(crate) fn generate_matrix_with_ids<R: Rng + ?Sized>(
    ids: Arc<[String]>,
    params: &ItemParams,
    k: usize,
    family: ResponseFamily,
    rng: &mut R,
) -> ResponseMatrix {
    let unit = Clip::new(0.0, 1.0);
    let mut values = Vec::with_capacity(params.len() * k);
    for &(mu, sigma) in &params.entries {
        for _ in 0..k {
            let z: f64 = rng.sample(StandardNormal);
            values.push(family.snap((mu + sigma * z).clamp(unit.lo, unit.hi)));
        }
    }
    ResponseMatrix::rectangular_unchecked(ids, k, values)
}

/// One `(G, A, B)` draw: shared item parameters, independent `G` and `A`,
/// and `B` from freshly perturbed locations.
pub fn generate_triple<R: Rng + ?Sized>(config: &ExperimentConfig, rng: &mut R) -> Result<Triple> {
    config.validate()?;
    Ok(generate_triple_with_ids(
        item_ids(config.n_items),
        config,
        rng,
    ))
}

pub(crate) fn generate_triple_with_ids<R: Rng + ?Sized>(
    ids: Arc<[String]>,
    config: &ExperimentConfig,
    rng: &mut R,
) -> Triple {
    let prior = &config.prior;
    let entries = (0..config.n_items)
        .map(|_| {
            let mu = prior.location.sample_one(rng);
            let sigma = prior.scale.sample_one(rng).max(0.0);
            (mu, sigma)
        })
        .collect();
    let params = ItemParams { entries };
    let k = config.k_responses;
    let gold = generate_matrix_with_ids(ids.clone(), &params, k, config.family, rng);
    let a = generate_matrix_with_ids(ids.clone(), &params, k, config.family, rng);
    let shifted = perturb_params(&params, config.epsilon, rng);
    let b = generate_matrix_with_ids(ids, &shifted, k, config.family, rng);
    Triple { gold, a, b }
}
