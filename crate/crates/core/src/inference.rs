//! Alternative and null resample collections and the expected one-sided
//! p-value under the alternative.
//!
//! Alternative resamples are fresh simulated triples (`Parametric`) or
//! multistage bootstrap resamples of a supplied triple (`BootstrapOfGiven`).
//! Null resamples pool `A` and `B` per item and draw both models from the
//! pool. The sampling strategy applies to both arms.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::matrix::{ResponseMatrix, Triple};
use crate::metrics::{score_triple, MetricId, MetricResult};
use crate::rng::StreamKey;
use crate::simulator::{generate_triple_with_ids, item_ids, ItemPrior, ResponseFamily};
use crate::stats::{median_sorted, sort_floats, sorted};

const TAG_BASE: u64 = 0xba5e;
const TAG_ALT: u64 = 1;
const TAG_NULL: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Keep everything, in order.
    All,
    /// Resample with replacement.
    Boot,
}

/// Sampling strategy: how items, then responses within items, are resampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SamplingStrategy {
    pub items: SamplingMode,
    pub responses: SamplingMode,
}

impl SamplingStrategy {
    pub const IDENTITY: Self = Self::new(SamplingMode::All, SamplingMode::All);
    pub const MULTISTAGE: Self = Self::new(SamplingMode::Boot, SamplingMode::Boot);
    pub const RESPONSES_ONLY: Self = Self::new(SamplingMode::All, SamplingMode::Boot);
    pub const ITEMS_ONLY: Self = Self::new(SamplingMode::Boot, SamplingMode::All);
    pub const ALL: [Self; 4] = [
        Self::IDENTITY,
        Self::ITEMS_ONLY,
        Self::RESPONSES_ONLY,
        Self::MULTISTAGE,
    ];

    pub const fn new(items: SamplingMode, responses: SamplingMode) -> Self {
        SamplingStrategy { items, responses }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

impl Default for SamplingStrategy {
    fn default() -> Self {
        Self::RESPONSES_ONLY
    }
}

impl fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |m: SamplingMode| match m {
            SamplingMode::All => "all",
            SamplingMode::Boot => "boot",
        };
        write!(f, "{},{}", name(self.items), name(self.responses))
    }
}

impl FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mode = |t: &str| match t.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(SamplingMode::All),
            "boot" => Ok(SamplingMode::Boot),
            _ => Err(Error::param("phi", "expected `all` or `boot`")),
        };
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (items, responses) = s
            .split_once(',')
            .ok_or_else(|| Error::param("phi", "expected `<items>,<responses>`"))?;
        Ok(SamplingStrategy::new(mode(items)?, mode(responses)?))
    }
}

impl TryFrom<String> for SamplingStrategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SamplingStrategy> for String {
    fn from(s: SamplingStrategy) -> String {
        s.to_string()
    }
}

/// Where alternative resamples come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentMode {
    /// Fresh simulator draws.
    #[default]
    Parametric,
    /// Multistage bootstrap of a supplied triple.
    BootstrapOfGiven,
}

/// Everything needed to run one p-value experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub n_items: usize,
    pub k_responses: usize,
    pub epsilon: f64,
    pub b_alt: usize,
    pub b_null: usize,
    /// Resampling of supplied data. Parametric draws are fresh and ignore it.
    pub phi: SamplingStrategy,
    pub metrics: Vec<MetricId>,
    pub prior: ItemPrior,
    pub family: ResponseFamily,
    pub seed: u64,
    pub alpha: f64,
    pub mode: ExperimentMode,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_items: 100,
            k_responses: 10,
            epsilon: 0.0,
            b_alt: 500,
            b_null: 500,
            phi: SamplingStrategy::default(),
            metrics: alloc::vec![MetricId::Mae, MetricId::Wins, MetricId::Memd],
            prior: ItemPrior::default_synthetic(),
            family: ResponseFamily::default(),
            seed: 0,
            alpha: 0.05,
            mode: ExperimentMode::Parametric,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_items == 0 {
            return Err(Error::config("n_items must be ≥ 1"));
        }
        if self.k_responses == 0 {
            return Err(Error::config("k_responses must be ≥ 1"));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config("epsilon must be ≥ 0"));
        }
        if self.b_alt == 0 || self.b_null == 0 {
            return Err(Error::config("b_alt and b_null must be ≥ 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config("alpha must lie in (0, 1)"));
        }
        if self.metrics.is_empty() {
            return Err(Error::config("at least one metric is required"));
        }
        self.prior.validate()?;
        self.family.validate()?;
        Ok(())
    }

    pub fn key(&self) -> StreamKey {
        StreamKey::new(self.seed)
    }
}

fn draw_index<R: Rng + ?Sized>(
    m: &ResponseMatrix,
    mode: SamplingMode,
    rng: &mut R,
) -> (Option<Vec<usize>>, Arc<[String]>) {
    let n = m.n_items();
    match mode {
        SamplingMode::All => (None, m.ids().clone()),
        SamplingMode::Boot => {
            let index: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let src = m.ids();
            let ids: Vec<String> = index.iter().map(|&i| src[i].clone()).collect();
            (Some(index), ids.into())
        }
    }
}

fn pick<R: Rng + ?Sized>(
    m: &ResponseMatrix,
    index: Option<&[usize]>,
    ids: &Arc<[String]>,
    boot_responses: bool,
    rng: &mut R,
) -> ResponseMatrix {
    if index.is_none() && !boot_responses {
        return m.clone();
    }
    let n = m.n_items();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut values = Vec::with_capacity(m.len());
    let mut push = |item: &[f64], values: &mut Vec<f64>| {
        if boot_responses && !item.is_empty() {
            let len = item.len();
            values.extend((0..len).map(|_| item[rng.random_range(0..len)]));
        } else {
            values.extend_from_slice(item);
        }
        offsets.push(values.len());
    };
    match index {
        Some(index) => index.iter().for_each(|&i| push(m.item(i), &mut values)),
        None => (0..n).for_each(|i| push(m.item(i), &mut values)),
    }
    m.with_layout(offsets, values).with_ids(ids.clone())
}

/// Resamples items (one index sequence shared by `G`, `A`, `B`), then
/// responses within each item of each matrix independently.
pub fn resample_multistage<R: Rng + ?Sized>(
    triple: &Triple,
    phi: SamplingStrategy,
    rng: &mut R,
) -> Triple {
    if phi.is_identity() {
        return triple.clone();
    }
    let (index, ids) = draw_index(&triple.gold, phi.items, rng);
    let boot = phi.responses == SamplingMode::Boot;
    let gold = pick(&triple.gold, index.as_deref(), &ids, boot, rng);
    let a = pick(&triple.a, index.as_deref(), &ids, boot, rng);
    let b = pick(&triple.b, index.as_deref(), &ids, boot, rng);
    Triple { gold, a, b }
}

/// Per-item multiset union of `A_i` and `B_i`.
pub fn build_null_pool(a: &ResponseMatrix, b: &ResponseMatrix) -> Result<ResponseMatrix> {
    a.check_aligned(b)?;
    let mut offsets = Vec::with_capacity(a.n_items() + 1);
    offsets.push(0);
    let mut values = Vec::with_capacity(a.len() + b.len());
    for i in 0..a.n_items() {
        let (ai, bi) = (a.item(i), b.item(i));
        if ai.len() != bi.len() {
            return Err(Error::InvalidParam {
                name: a.item_id(i).to_string(),
                reason: "A and B hold different numbers of responses".to_string(),
            });
        }
        values.extend_from_slice(ai);
        values.extend_from_slice(bi);
        offsets.push(values.len());
    }
    Ok(a.with_layout(offsets, values))
}

fn draw_from_pool<R: Rng + ?Sized>(
    pool: &ResponseMatrix,
    size: impl Fn(usize) -> usize,
    rng: &mut R,
) -> (ResponseMatrix, ResponseMatrix) {
    let n = pool.n_items();
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut a_vals = Vec::with_capacity(pool.len() / 2);
    let mut b_vals = Vec::with_capacity(pool.len() / 2);
    for i in 0..n {
        let item = pool.item(i);
        let k = size(i);
        let len = item.len();
        a_vals.extend((0..k).map(|_| item[rng.random_range(0..len)]));
        b_vals.extend((0..k).map(|_| item[rng.random_range(0..len)]));
        offsets.push(a_vals.len());
    }
    (
        pool.with_layout(offsets.clone(), a_vals),
        pool.with_layout(offsets, b_vals),
    )
}

/// Two independent with-replacement samples of size `k` per pooled item.
pub fn sample_null_pair<R: Rng + ?Sized>(
    pool: &ResponseMatrix,
    k: usize,
    rng: &mut R,
) -> Result<(ResponseMatrix, ResponseMatrix)> {
    pool.check_nonempty()?;
    Ok(draw_from_pool(pool, |_| k, rng))
}

/// Which tail of the null scores counts as "at least as extreme".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Null score `>=` alternative score.
    GreaterEqual,
    /// Null score `<` alternative score.
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub p: f64,
    pub direction: Direction,
    pub median_alt: f64,
    pub median_null: f64,
}

/// Mean over alternative scores of the one-sided fraction of null scores at
/// least as extreme, the side being fixed by comparing the two medians.
pub fn estimate_p_value(alt_scores: &[f64], null_scores: &[f64]) -> Result<PValue> {
    if alt_scores.is_empty() || null_scores.is_empty() {
        return Err(Error::EmptySample);
    }
    let null = sorted(null_scores);
    let median_alt = median_sorted(&sorted(alt_scores));
    let median_null = median_sorted(&null);
    let direction = if median_alt >= median_null {
        Direction::GreaterEqual
    } else {
        Direction::Less
    };
    let n = null.len() as u64;
    let count: u64 = alt_scores
        .iter()
        .map(|&s| {
            let below = null.partition_point(|&v| v < s) as u64;
            match direction {
                Direction::GreaterEqual => n - below,
                Direction::Less => below,
            }
        })
        .sum();
    Ok(PValue {
        p: count as f64 / (n as f64 * alt_scores.len() as f64),
        direction,
        median_alt,
        median_null,
    })
}

/// Location summary of a score collection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl ScoreSummary {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        sort_floats(&mut v);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        ScoreSummary {
            count: v.len(),
            mean,
            std: libm::sqrt(var),
            min: v[0],
            median: median_sorted(&v),
            max: v[v.len() - 1],
        }
    }
}

/// Result for one metric of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPValue {
    pub metric: MetricId,
    pub p_value: f64,
    pub direction: Direction,
    pub median_alt: f64,
    pub median_null: f64,
    pub significant: bool,
    pub alt_scores: ScoreSummary,
    pub null_scores: ScoreSummary,
    /// Mean per-model score of `A` over the alternative resamples.
    pub mean_score_a: f64,
    /// Mean per-model score of `B` over the alternative resamples.
    pub mean_score_b: f64,
}

impl MetricPValue {
    /// `|mean_score_a - mean_score_b|`.
    pub fn delta(&self) -> f64 {
        (self.mean_score_a - self.mean_score_b).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PValueReport {
    pub n_items: usize,
    pub k_responses: usize,
    pub epsilon: f64,
    pub phi: SamplingStrategy,
    pub mode: ExperimentMode,
    pub b_alt: usize,
    pub b_null: usize,
    pub alpha: f64,
    pub seed: u64,
    pub metrics: Vec<MetricPValue>,
}

impl PValueReport {
    pub fn metric(&self, id: MetricId) -> Option<&MetricPValue> {
        self.metrics.iter().find(|m| m.metric == id)
    }
}

/// Runs the experiment described by `config`. `BootstrapOfGiven` needs a
/// supplied triple, see [`run_experiment_on`].
pub fn run_experiment<E: Executor>(config: &ExperimentConfig, exec: &E) -> Result<PValueReport> {
    run_experiment_on(config, None, exec)
}

/// Scores of every alternative resample, one row per resample.
pub fn alternative_scores<E: Executor>(
    config: &ExperimentConfig,
    base: Option<&Triple>,
    exec: &E,
) -> Result<Vec<Vec<MetricResult>>> {
    config.validate()?;
    let key = config.key();
    let ids = match base {
        Some(t) => t.gold.ids().clone(),
        None => item_ids(config.n_items),
    };
    let alt_key = key.child(TAG_ALT);
    let rows = exec.map(config.b_alt, |i| {
        let mut rng = alt_key.child(i as u64).rng();
        let triple = match (config.mode, base) {
            // fresh draws already carry all sampling variability, so Φ is not applied
            (ExperimentMode::Parametric, _) => generate_triple_with_ids(ids.clone(), config, &mut rng),
            (ExperimentMode::BootstrapOfGiven, Some(t)) => resample_multistage(t, config.phi, &mut rng),
            (ExperimentMode::BootstrapOfGiven, None) => {
                return Err(Error::config("bootstrap-of-given mode needs input matrices"))
            }
        };
        score_triple(&config.metrics, &triple)
    });
    rows.into_iter().collect()
}

/// One null-hypothesis triple drawn from the pooled `A`/`B` responses.
///
/// Parametric mode keeps the base `G`. When bootstrapping given data, the
/// item index of Φ is shared by `G` and the pool and `G`'s responses are
/// resampled per Φ; the pool draw itself already resamples `A` and `B`.
fn null_triple<R: Rng + ?Sized>(
    config: &ExperimentConfig,
    base: &Triple,
    pool: &ResponseMatrix,
    rng: &mut R,
) -> Triple {
    let (gold, pool) = match config.mode {
        ExperimentMode::Parametric => (base.gold.clone(), pool.clone()),
        ExperimentMode::BootstrapOfGiven => {
            let (index, ids) = draw_index(&base.gold, config.phi.items, rng);
            let boot = config.phi.responses == SamplingMode::Boot;
            let gold = pick(&base.gold, index.as_deref(), &ids, boot, rng);
            let pool = pick(pool, index.as_deref(), &ids, false, rng);
            (gold, pool)
        }
    };
    let (a, b) = draw_from_pool(&pool, |j| pool.item(j).len() / 2, rng);
    Triple { gold, a, b }
}

/// Runs the experiment with an optional base triple. In `Parametric` mode a
/// supplied base replaces the simulated one; the null pool is always built
/// from the base.
pub fn run_experiment_on<E: Executor>(
    config: &ExperimentConfig,
    base: Option<&Triple>,
    exec: &E,
) -> Result<PValueReport> {
    config.validate()?;
    let key = config.key();
    let generated;
    let base = match (base, config.mode) {
        (Some(t), _) => {
            t.gold.check_aligned(&t.a)?;
            t.gold.check_aligned(&t.b)?;
            t
        }
        (None, ExperimentMode::Parametric) => {
            let mut rng = key.child(TAG_BASE).rng();
            generated = generate_triple_with_ids(item_ids(config.n_items), config, &mut rng);
            &generated
        }
        (None, ExperimentMode::BootstrapOfGiven) => {
            return Err(Error::config("bootstrap-of-given mode needs input matrices"))
        }
    };
    base.gold.check_nonempty()?;
    base.a.check_nonempty()?;
    base.b.check_nonempty()?;

    let alt = alternative_scores(config, Some(base), exec)?;

    let pool = build_null_pool(&base.a, &base.b)?;
    let null_key = key.child(TAG_NULL);
    let null: Vec<Vec<MetricResult>> = exec
        .map(config.b_null, |i| {
            let mut rng = null_key.child(i as u64).rng();
            let triple = null_triple(config, base, &pool, &mut rng);
            score_triple(&config.metrics, &triple)
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let metrics = config
        .metrics
        .iter()
        .enumerate()
        .map(|(m, &metric)| {
            let alt_cmp: Vec<f64> = alt.iter().map(|row| row[m].comparison).collect();
            let null_cmp: Vec<f64> = null.iter().map(|row| row[m].comparison).collect();
            let pv = estimate_p_value(&alt_cmp, &null_cmp)?;
            let nalt = alt.len() as f64;
            Ok(MetricPValue {
                metric,
                p_value: pv.p,
                direction: pv.direction,
                median_alt: pv.median_alt,
                median_null: pv.median_null,
                significant: pv.p < config.alpha,
                alt_scores: ScoreSummary::of(&alt_cmp),
                null_scores: ScoreSummary::of(&null_cmp),
                mean_score_a: alt.iter().map(|row| row[m].score_a).sum::<f64>() / nalt,
                mean_score_b: alt.iter().map(|row| row[m].score_b).sum::<f64>() / nalt,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PValueReport {
        n_items: base.gold.n_items(),
        k_responses: base.gold.rectangular_width().unwrap_or(config.k_responses),
        epsilon: config.epsilon,
        phi: config.phi,
        mode: config.mode,
        b_alt: config.b_alt,
        b_null: config.b_null,
        alpha: config.alpha,
        seed: config.seed,
        metrics,
    })
}
