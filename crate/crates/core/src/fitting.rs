//! Grid-search fitting of an [`ItemPrior`] to observed per-item statistics.
//!
//! Location and scale are fitted independently: the per-item means are
//! compared against candidate location distributions and the per-item
//! standard deviations against candidate scale distributions, each by the
//! 1-Wasserstein distance between the observed and simulated values.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{Clip, DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::matrix::ResponseMatrix;
use crate::metrics::emd_sorted;
use crate::rng::StreamKey;
use crate::simulator::ItemPrior;
use crate::stats::{mean, population_std, sort_floats};

const TAG_LOCATION: u64 = 0x6c6f63;
const TAG_SCALE: u64 = 0x736361;

/// Default simulated sample size is this many times the number of items...
pub const SIM_COUNT_PER_ITEM: usize = 10;
/// ...but never more than this.
pub const SIM_COUNT_MAX: usize = 100_000;

/// Per-item means lie here for responses in `[0, 1]`.
pub const LOCATION_DOMAIN: Clip = Clip { lo: 0.0, hi: 1.0 };
/// Population standard deviations of values in `[0, 1]` lie here.
pub const SCALE_DOMAIN: Clip = Clip { lo: 0.0, hi: 0.5 };

/// Per-item response means and population standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemStats {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl ItemStats {
    pub fn new(means: Vec<f64>, stds: Vec<f64>) -> Result<Self> {
        if means.len() != stds.len() {
            return Err(Error::LengthMismatch(means.len(), stds.len()));
        }
        if means.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(s) = stds.iter().find(|s| s.is_nan() || **s < 0.0) {
            return Err(Error::param("stds", alloc::format!("negative or NaN value {s}")));
        }
        Ok(ItemStats { means, stds })
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }
}

pub fn per_item_stats(m: &ResponseMatrix) -> Result<ItemStats> {
    m.check_nonempty()?;
    let means = m.items().map(|(_, r)| mean(r)).collect();
    let stds = m.items().map(|(_, r)| population_std(r)).collect();
    Ok(ItemStats { means, stds })
}

/// Right-continuous empirical CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

pub fn ecdf(values: &[f64]) -> Result<Ecdf> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = values.to_vec();
    sort_floats(&mut sorted);
    Ok(Ecdf { sorted })
}

impl Ecdf {
    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    /// Distinct support points with the ECDF value reached at each.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in self.sorted.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 = f,
                _ => out.push((v, f)),
            }
        }
        out
    }

    /// `sup_x |ECDF(x) - cdf(x)|`, checking both sides of every jump.
    pub fn kolmogorov_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let mut below = 0.0;
        let mut worst: f64 = 0.0;
        for (x, f) in self.steps() {
            worst = worst.max((cdf(x.next_down()) - below).abs());
            worst = worst.max((cdf(x) - f).abs());
            below = f;
        }
        worst
    }
}

fn distance_in<R: Rng + ?Sized>(
    real_sorted: &[f64],
    spec: &DistributionSpec,
    domain: Clip,
    sim_count: usize,
    rng: &mut R,
) -> f64 {
    let mut sim: Vec<f64> = (0..sim_count)
        .map(|_| spec.sample_one(rng).clamp(domain.lo, domain.hi))
        .collect();
    sort_floats(&mut sim);
    emd_sorted(real_sorted, &sim)
}

/// 1-Wasserstein distance between `real_values` and `sim_count` draws from
/// `spec`.
pub fn stat_distance<R: Rng + ?Sized>(
    real_values: &[f64],
    spec: &DistributionSpec,
    sim_count: usize,
    rng: &mut R,
) -> Result<f64> {
    if real_values.is_empty() || sim_count == 0 {
        return Err(Error::EmptySample);
    }
    spec.validate()?;
    let mut real = real_values.to_vec();
    sort_floats(&mut real);
    Ok(distance_in(&real, spec, Clip::NONE, sim_count, rng))
}

/// Values of one parameter: an inclusive `start:stop:step` range or a list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamAxis {
    pub name: String,
    pub values: Vec<f64>,
}

/// Cartesian grid over the parameters of one family.
///
/// Iteration order is lexicographic in the order the parameters were given,
/// the last parameter varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrid {
    pub axes: Vec<ParamAxis>,
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::param("grid", alloc::format!("`{s}` is not a number")))
}

fn range_values(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::param("grid", "range needs start ≤ stop and step > 0"));
    }
    let count = libm::floor((stop - start) / step + 1e-9) as usize + 1;
    if count > 1_000_000 {
        return Err(Error::param("grid", "range has too many points"));
    }
    // rounding keeps 0.1 + 2 * 0.01 printing as 0.12
    Ok((0..count)
        .map(|i| libm::round((start + i as f64 * step) * 1e12) / 1e12)
        .collect())
}

impl FromStr for ParamAxis {
    type Err = Error;

    /// `name=start:stop:step`, `name=v1|v2|…` or `name=v`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rhs) = s
            .split_once('=')
            .ok_or_else(|| Error::param("grid", alloc::format!("`{s}` is not name=values")))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(Error::param("grid", "empty parameter name"));
        }
        let parts: Vec<&str> = rhs.split(':').collect();
        let values = match parts.as_slice() {
            [start, stop, step] => range_values(parse_number(start)?, parse_number(stop)?, parse_number(step)?)?,
            [list] => list.split('|').map(parse_number).collect::<Result<_>>()?,
            _ => return Err(Error::param("grid", alloc::format!("cannot parse `{rhs}`"))),
        };
        Ok(ParamAxis {
            name: name.to_string(),
            values,
        })
    }
}

impl FromStr for ParamGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let axes: Vec<ParamAxis> = s
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        ParamGrid::new(axes)
    }
}

impl fmt::Display for ParamGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, axis) in self.axes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}=", axis.name)?;
            for (j, v) in axis.values.iter().enumerate() {
                if j > 0 {
                    f.write_str("|")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

impl ParamGrid {
    pub fn new(axes: Vec<ParamAxis>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.values.is_empty()) {
            return Err(Error::param("grid", "every parameter needs at least one value"));
        }
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::param("grid", alloc::format!("parameter `{}` given twice", a.name)));
            }
        }
        Ok(ParamGrid { axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `index`-th grid point as a parameter map.
    pub fn point(&self, mut index: usize) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for axis in self.axes.iter().rev() {
            let n = axis.values.len();
            out.insert(axis.name.clone(), axis.values[index % n]);
            index /= n;
        }
        out
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEvaluation {
    pub spec: DistributionSpec,
    pub distance: f64,
}

/// Fitted location axis or scale axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisFit {
    pub family: Family,
    pub grid: String,
    pub best: DistributionSpec,
    pub distance: f64,
    pub evaluated: usize,
    pub skipped: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<Vec<GridEvaluation>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub location_spec: DistributionSpec,
    pub scale_spec: DistributionSpec,
    pub fit_error: f64,
    pub n_items: usize,
    pub sim_count: usize,
    pub seed: u64,
    pub location: AxisFit,
    pub scale: AxisFit,
}

impl FitReport {
    pub fn prior(&self) -> ItemPrior {
        ItemPrior::new(self.location_spec, self.scale_spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[derive(Default)]
pub struct FitOptions {
    /// Defaults to [`default_sim_count`].
    pub sim_count: Option<usize>,
    pub seed: u64,
    /// Keep every evaluated grid point in the report.
    pub keep_surface: bool,
}


pub fn default_sim_count(n_items: usize) -> usize {
    n_items.saturating_mul(SIM_COUNT_PER_ITEM).clamp(1, SIM_COUNT_MAX)
}

/// Every grid point is scored against the same simulated stream (common
/// random numbers), so neighbouring candidates differ only through their
/// parameters and the argmin is not decided by sampling noise.
#[allow(clippy::too_many_arguments)]
fn fit_axis<E: Executor>(
    values: &[f64],
    family: Family,
    grid: &ParamGrid,
    domain: Clip,
    sim_count: usize,
    key: StreamKey,
    keep_surface: bool,
    exec: &E,
) -> Result<AxisFit> {
    let mut real = values.to_vec();
    sort_floats(&mut real);
    let evaluations: Vec<Option<GridEvaluation>> = exec.map(grid.len(), |i| {
        let spec = DistributionSpec::from_params(family, &grid.point(i)).ok()?;
        spec.validate().ok()?;
        let distance = distance_in(&real, &spec, domain, sim_count, &mut key.rng());
        Some(GridEvaluation { spec, distance })
    });
    let skipped = evaluations.iter().filter(|e| e.is_none()).count();
    let mut best: Option<&GridEvaluation> = None;
    for e in evaluations.iter().flatten() {
        if best.is_none_or(|b| e.distance < b.distance) {
            best = Some(e);
        }
    }
    let best = best.ok_or(Error::NoValidGridPoint)?.clone();
    Ok(AxisFit {
        family,
        grid: grid.to_string(),
        best: best.spec,
        distance: best.distance,
        evaluated: evaluations.len() - skipped,
        skipped,
        surface: keep_surface.then(|| evaluations.into_iter().flatten().collect()),
    })
}

/// Fits location and scale distributions by grid search.
///
/// Simulated candidate values are clamped to the range the statistic can
/// take ([`LOCATION_DOMAIN`], [`SCALE_DOMAIN`]) before comparison, so
/// families with support outside `[0, 1]` are scored as the simulator would
/// experience them. The first grid point wins ties.
pub fn fit_prior<E: Executor>(
    stats: &ItemStats,
    location_family: Family,
    location_grid: &ParamGrid,
    scale_family: Family,
    scale_grid: &ParamGrid,
    options: &FitOptions,
    exec: &E,
) -> Result<FitReport> {
    if stats.is_empty() {
        return Err(Error::EmptySample);
    }
    let sim_count = options.sim_count.unwrap_or_else(|| default_sim_count(stats.len()));
    if sim_count == 0 {
        return Err(Error::config("sim_count must be ≥ 1"));
    }
    let key = StreamKey::new(options.seed);
    let location = fit_axis(
        &stats.means,
        location_family,
        location_grid,
        LOCATION_DOMAIN,
        sim_count,
        key.child(TAG_LOCATION),
        options.keep_surface,
        exec,
    )?;
    let scale = fit_axis(
        &stats.stds,
        scale_family,
        scale_grid,
        SCALE_DOMAIN,
        sim_count,
        key.child(TAG_SCALE),
        options.keep_surface,
        exec,
    )?;
    Ok(FitReport {
        location_spec: location.best,
        scale_spec: scale.best,
        fit_error: location.distance + scale.distance,
        n_items: stats.len(),
        sim_count,
        seed: options.seed,
        location,
        scale,
    })
}
