//! Power of the multistage bootstrap and of three paired baselines.
//!
//! Every test is one-sided toward "B is worse than A". The baselines see
//! only the per-item absolute errors of the model means against the gold
//! mean; the bootstrap sees the full response matrices.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::inference::{run_experiment_on, ExperimentConfig};
use crate::matrix::ResponseMatrix;
use crate::rng::StreamKey;
use crate::simulator::{generate_triple_with_ids, item_ids};
use crate::special::{normal_sf, student_t_sf};
use crate::stats::{mean, sample_variance};

const TAG_POWER: u64 = 0x0070_6f77;
const TAG_SWEEP: u64 = 0x7377_6570;

/// Wilcoxon sample sizes up to this use the exact null distribution.
pub const WILCOXON_EXACT_MAX: usize = 20;
/// Paired permutation sample sizes up to this enumerate all sign patterns.
pub const PERMUTATION_EXACT_MAX: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestId {
    MultistageBootstrap,
    WelchT,
    WilcoxonSignedRank,
    PermutationPaired,
}

impl TestId {
    pub const ALL: [TestId; 4] = [
        TestId::MultistageBootstrap,
        TestId::WelchT,
        TestId::WilcoxonSignedRank,
        TestId::PermutationPaired,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestId::MultistageBootstrap => "multistage-bootstrap",
            TestId::WelchT => "welch-t",
            TestId::WilcoxonSignedRank => "wilcoxon-signed-rank",
            TestId::PermutationPaired => "permutation-paired",
        }
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "multistage-bootstrap" | "bootstrap" | "multistage" => Ok(TestId::MultistageBootstrap),
            "welch-t" | "welch" | "t" => Ok(TestId::WelchT),
            "wilcoxon-signed-rank" | "wilcoxon" => Ok(TestId::WilcoxonSignedRank),
            "permutation-paired" | "permutation" => Ok(TestId::PermutationPaired),
            _ => Err(Error::param("test", "unknown test")),
        }
    }
}

/// `|mean(M_i) - mean(G_i)|` per item, in item order.
pub fn per_item_errors(m: &ResponseMatrix, g: &ResponseMatrix) -> Result<Vec<f64>> {
    m.check_aligned(g)?;
    let mm = m.item_means()?;
    let gm = g.item_means()?;
    Ok(mm.iter().zip(&gm).map(|(a, b)| (a - b).abs()).collect())
}

/// One-sided Welch t-test of "`y` has the larger center".
pub fn welch_t_test(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::EmptySample);
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (vx, vy) = (sample_variance(x) / nx, sample_variance(y) / ny);
    if vx == 0.0 && vy == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    let se2 = vx + vy;
    let t = (mean(y) - mean(x)) / libm::sqrt(se2);
    let df = se2 * se2 / (vx * vx / (nx - 1.0) + vy * vy / (ny - 1.0));
    Ok(student_t_sf(t, df))
}

// Midranks of |d| scaled by two so ties stay integral.
fn doubled_ranks(abs: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..abs.len()).collect();
    order.sort_by(|&i, &j| abs[i].total_cmp(&abs[j]));
    let mut ranks = alloc::vec![0u64; abs.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && abs[order[end]] == abs[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end; doubled midrank is start+1+end
        let r2 = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = r2;
        }
        start = end;
    }
    ranks
}

/// One-sided Wilcoxon signed-rank test of "differences are shifted upward".
///
/// Exact zeros are dropped. Up to [`WILCOXON_EXACT_MAX`] nonzero differences
/// the exact sign-symmetry distribution is used; above that a normal
/// approximation with tie-corrected variance and continuity correction.
pub fn wilcoxon_signed_rank(d: &[f64]) -> Result<f64> {
    let (abs, r2, w2) = signed_ranks(d)?;
    let m = abs.len();
    if m <= WILCOXON_EXACT_MAX {
        // counts[s]: sign patterns whose positive doubled ranks sum to s
        let total: u64 = r2.iter().sum();
        let mut counts = alloc::vec![0u64; total as usize + 1];
        counts[0] = 1;
        let mut reach = 0usize;
        for &r in &r2 {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] != 0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let at_least: u64 = counts[w2 as usize..].iter().sum();
        return Ok(at_least as f64 / libm::ldexp(1.0, m as i32));
    }
    Ok(normal_tail(&abs, w2 as f64 / 2.0))
}

/// Normal approximation of `P(W >= W+)` regardless of sample size.
pub fn wilcoxon_normal_approx(d: &[f64]) -> Result<f64> {
    let (abs, _, w2) = signed_ranks(d)?;
    Ok(normal_tail(&abs, w2 as f64 / 2.0))
}

// |d| of the nonzero differences, their doubled midranks and doubled W+.
fn signed_ranks(d: &[f64]) -> Result<(Vec<f64>, Vec<u64>, u64)> {
    let nz: Vec<f64> = d.iter().copied().filter(|&v| v != 0.0).collect();
    if nz.is_empty() {
        return Err(Error::AllZeroDifferences);
    }
    let abs: Vec<f64> = nz.iter().map(|v| v.abs()).collect();
    let r2 = doubled_ranks(&abs);
    let w2 = nz.iter().zip(&r2).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    Ok((abs, r2, w2))
}

fn normal_tail(abs: &[f64], w: f64) -> f64 {
    let mf = abs.len() as f64;
    let mean_w = mf * (mf + 1.0) / 4.0;
    let mut sorted_abs = abs.to_vec();
    sorted_abs.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted_abs.len() {
        let mut j = i + 1;
        while j < sorted_abs.len() && sorted_abs[j] == sorted_abs[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = mf * (mf + 1.0) * (2.0 * mf + 1.0) / 24.0 - tie_term / 48.0;
    normal_sf((w - mean_w - 0.5) / libm::sqrt(var))
}

fn sign_tolerance(d: &[f64]) -> f64 {
    1e-12 * d.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE)
}

/// One-sided paired permutation test of "`y` has the larger mean".
///
/// Each permutation swaps `x_i` and `y_i` independently with probability
/// one half. Up to [`PERMUTATION_EXACT_MAX`] pairs every swap pattern is
/// enumerated and `p = #{pattern >= observed} / 2^n`; above that,
/// `p = (1 + #{permuted >= observed}) / (1 + iterations)`.
pub fn permutation_test_paired<R: Rng + ?Sized>(
    x: &[f64],
    y: &[f64],
    iterations: usize,
    rng: &mut R,
) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.is_empty() {
        return Err(Error::EmptySample);
    }
    let d: Vec<f64> = y.iter().zip(x).map(|(b, a)| b - a).collect();
    let observed: f64 = d.iter().sum();
    let threshold = observed - sign_tolerance(&d);
    let n = d.len();
    if n <= PERMUTATION_EXACT_MAX {
        let patterns = 1u64 << n;
        let hits = (0..patterns)
            .filter(|mask| {
                let s: f64 = d
                    .iter()
                    .enumerate()
                    .map(|(i, v)| if mask >> i & 1 == 1 { -v } else { *v })
                    .sum();
                s >= threshold
            })
            .count();
        return Ok(hits as f64 / patterns as f64);
    }
    let hits = (0..iterations)
        .filter(|_| {
            let s: f64 = d
                .iter()
                .map(|v| if rng.random::<bool>() { -v } else { *v })
                .sum();
            s >= threshold
        })
        .count();
    Ok((1 + hits) as f64 / (1 + iterations) as f64)
}

/// Rejection rate of one test at one design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerReport {
    pub test: TestId,
    pub alpha: f64,
    pub trials: usize,
    pub rejections: usize,
    pub power: f64,
    pub n_items: usize,
    pub k_responses: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Vary `N`.
    Items,
    /// Vary `K`.
    Responses,
}

/// One point of a power curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub axis: SweepAxis,
    pub axis_value: usize,
    pub reports: Vec<PowerReport>,
}

/// Trial settings shared by all tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSettings {
    pub trials: usize,
    /// Monte Carlo iterations for the permutation test above its exact range.
    pub permutation_iterations: usize,
}

impl Default for PowerSettings {
    fn default() -> Self {
        PowerSettings {
            trials: 200,
            permutation_iterations: 1000,
        }
    }
}

fn baseline_p(test: TestId, x: &[f64], y: &[f64], iterations: usize, key: StreamKey) -> Result<f64> {
    let p = match test {
        TestId::WelchT => welch_t_test(x, y),
        TestId::WilcoxonSignedRank => {
            let d: Vec<f64> = y.iter().zip(x).map(|(b, a)| b - a).collect();
            wilcoxon_signed_rank(&d)
        }
        TestId::PermutationPaired => permutation_test_paired(x, y, iterations, &mut key.rng()),
        TestId::MultistageBootstrap => unreachable!("handled by the caller"),
    };
    match p {
        // no spread at all: nothing to reject on
        Err(Error::DegenerateVariance) | Err(Error::AllZeroDifferences) => Ok(1.0),
        other => other,
    }
}

/// Power of several tests over the same simulated trials.
///
/// Each trial draws a fresh `(G, A, B)` triple. The bootstrap runs
/// [`run_experiment_on`] with that triple as base and rejects when the
/// p-value of the config's first metric is below `alpha`; the baselines
/// test the per-item errors of `A` and `B` on the same triple.
pub fn estimate_power_many<E: Executor>(
    config: &ExperimentConfig,
    tests: &[TestId],
    settings: PowerSettings,
    exec: &E,
) -> Result<Vec<PowerReport>> {
    config.validate()?;
    if settings.trials == 0 {
        return Err(Error::config("trials must be ≥ 1"));
    }
    if tests.is_empty() {
        return Err(Error::config("at least one test is required"));
    }
    let key = config.key().child(TAG_POWER);
    let ids = item_ids(config.n_items);
    let outcomes: Vec<Result<Vec<bool>>> = exec.map(settings.trials, |t| {
        let trial = key.child(t as u64);
        let triple = generate_triple_with_ids(ids.clone(), config, &mut trial.child(0).rng());
        let errors = if tests.iter().any(|&t| t != TestId::MultistageBootstrap) {
            Some((
                per_item_errors(&triple.a, &triple.gold)?,
                per_item_errors(&triple.b, &triple.gold)?,
            ))
        } else {
            None
        };
        tests
            .iter()
            .map(|&test| {
                let p = match test {
                    TestId::MultistageBootstrap => {
                        let sub = ExperimentConfig {
                            seed: trial.child(1).raw(),
                            metrics: config.metrics[..1].to_vec(),
                            ..config.clone()
                        };
                        let report = run_experiment_on(&sub, Some(&triple), &Sequential)?;
                        report.metrics[0].p_value
                    }
                    _ => {
                        let (x, y) = errors.as_ref().expect("errors computed");
                        baseline_p(test, x, y, settings.permutation_iterations, trial.child(2))?
                    }
                };
                Ok(p < config.alpha)
            })
            .collect()
    });
    let mut rejections = alloc::vec![0usize; tests.len()];
    for outcome in outcomes {
        for (r, rejected) in rejections.iter_mut().zip(outcome?) {
            *r += rejected as usize;
        }
    }
    Ok(tests
        .iter()
        .zip(rejections)
        .map(|(&test, rejections)| PowerReport {
            test,
            alpha: config.alpha,
            trials: settings.trials,
            rejections,
            power: rejections as f64 / settings.trials as f64,
            n_items: config.n_items,
            k_responses: config.k_responses,
            epsilon: config.epsilon,
        })
        .collect())
}

/// Power of a single test.
pub fn estimate_power<E: Executor>(
    config: &ExperimentConfig,
    test: TestId,
    trials: usize,
    exec: &E,
) -> Result<PowerReport> {
    let settings = PowerSettings {
        trials,
        ..PowerSettings::default()
    };
    Ok(estimate_power_many(config, &[test], settings, exec)?.remove(0))
}

/// Power curves along `N` or `K`. Each point gets its own seed derived from
/// the config seed and the axis value.
pub fn power_curve<E: Executor>(
    config: &ExperimentConfig,
    tests: &[TestId],
    axis: SweepAxis,
    values: &[usize],
    settings: PowerSettings,
    exec: &E,
) -> Result<Vec<PowerPoint>> {
    let sweep = config.key().child(TAG_SWEEP);
    values
        .iter()
        .map(|&v| {
            let mut point = ExperimentConfig {
                seed: sweep.child(v as u64).raw(),
                ..config.clone()
            };
            match axis {
                SweepAxis::Items => point.n_items = v,
                SweepAxis::Responses => point.k_responses = v,
            }
            Ok(PowerPoint {
                axis,
                axis_value: v,
                reports: estimate_power_many(&point, tests, settings, exec)?,
            })
        })
        .collect()
}
