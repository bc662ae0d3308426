//! One-dimensional distribution families used for item priors and responses.
//!
//! *Censored* families clip a latent draw into `[lo, hi]`, leaving point
//! masses at the bounds. *Truncated* families renormalize the density on
//! `[lo, hi]`, so the bounds carry no mass. `FoldedNormal` and `Triangular`
//! accept an optional clip interval, applied after folding.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{normal_cdf, normal_quantile, normal_sf};

/// Distribution family tag, as used in JSON and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Uniform,
    Normal,
    TruncatedNormal,
    CensoredNormal,
    FoldedNormal,
    Triangular,
    GaussianMixture2,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Uniform,
        Family::Normal,
        Family::TruncatedNormal,
        Family::CensoredNormal,
        Family::FoldedNormal,
        Family::Triangular,
        Family::GaussianMixture2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Normal => "normal",
            Family::TruncatedNormal => "truncated-normal",
            Family::CensoredNormal => "censored-normal",
            Family::FoldedNormal => "folded-normal",
            Family::Triangular => "triangular",
            Family::GaussianMixture2 => "gaussian-mixture2",
        }
    }

    /// Parameter names accepted by the family; `optional` ones may be omitted.
    pub fn param_names(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Family::Uniform => (&["lo", "hi"], &[]),
            Family::Normal => (&["mu", "sigma"], &[]),
            Family::TruncatedNormal | Family::CensoredNormal => (&["mu", "sigma", "lo", "hi"], &[]),
            Family::FoldedNormal => (&["mu", "sigma"], &["lo", "hi"]),
            Family::Triangular => (&["a", "b", "c"], &["lo", "hi"]),
            Family::GaussianMixture2 => (&["mu1", "sigma1", "mu2", "sigma2", "kappa"], &[]),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == norm)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

/// Optional clip interval; either side may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clip {
    pub lo: f64,
    pub hi: f64,
}

impl Clip {
    pub const NONE: Clip = Clip {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Clip { lo, hi }
    }

    fn apply(self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    fn cdf(self, x: f64, base: impl FnOnce(f64) -> f64) -> f64 {
        if x < self.lo {
            0.0
        } else if x >= self.hi {
            1.0
        } else {
            base(x)
        }
    }
}

/// A validated-on-construction-from-JSON, parameterized 1-D distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub enum DistributionSpec {
    Uniform { lo: f64, hi: f64 },
    Normal { mu: f64, sigma: f64 },
    TruncatedNormal { mu: f64, sigma: f64, lo: f64, hi: f64 },
    CensoredNormal { mu: f64, sigma: f64, lo: f64, hi: f64 },
    FoldedNormal { mu: f64, sigma: f64, clip: Clip },
    Triangular { a: f64, b: f64, c: f64, clip: Clip },
    GaussianMixture2 { mu1: f64, sigma1: f64, mu2: f64, sigma2: f64, kappa: f64 },
}

fn check_scale(name: &str, sigma: f64) -> Result<()> {
    if sigma < 0.0 {
        Err(Error::param(name, "negative scale"))
    } else {
        Ok(())
    }
}

fn check_bounds(lo: f64, hi: f64) -> Result<()> {
    if lo < hi {
        Ok(())
    } else {
        Err(Error::param("hi", "lo < hi violated"))
    }
}

// CDF of a normal that may be degenerate (sigma == 0) at `mu`.
fn normal_cdf_at(x: f64, mu: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        if x >= mu {
            1.0
        } else {
            0.0
        }
    } else {
        normal_cdf((x - mu) / sigma)
    }
}

impl DistributionSpec {
    pub fn uniform(lo: f64, hi: f64) -> Self {
        DistributionSpec::Uniform { lo, hi }
    }

    pub fn normal(mu: f64, sigma: f64) -> Self {
        DistributionSpec::Normal { mu, sigma }
    }

    pub fn truncated_normal(mu: f64, sigma: f64, lo: f64, hi: f64) -> Self {
        DistributionSpec::TruncatedNormal { mu, sigma, lo, hi }
    }

    pub fn censored_normal(mu: f64, sigma: f64, lo: f64, hi: f64) -> Self {
        DistributionSpec::CensoredNormal { mu, sigma, lo, hi }
    }

    pub fn folded_normal(mu: f64, sigma: f64) -> Self {
        DistributionSpec::FoldedNormal { mu, sigma, clip: Clip::NONE }
    }

    pub fn triangular(a: f64, b: f64, c: f64) -> Self {
        DistributionSpec::Triangular { a, b, c, clip: Clip::NONE }
    }

    pub fn gaussian_mixture2(mu1: f64, sigma1: f64, mu2: f64, sigma2: f64, kappa: f64) -> Self {
        DistributionSpec::GaussianMixture2 { mu1, sigma1, mu2, sigma2, kappa }
    }

    /// Adds a clip interval to a `FoldedNormal` or `Triangular` spec; other
    /// families are returned unchanged.
    pub fn clipped(self, lo: f64, hi: f64) -> Self {
        match self {
            DistributionSpec::FoldedNormal { mu, sigma, .. } => {
                DistributionSpec::FoldedNormal { mu, sigma, clip: Clip::new(lo, hi) }
            }
            DistributionSpec::Triangular { a, b, c, .. } => {
                DistributionSpec::Triangular { a, b, c, clip: Clip::new(lo, hi) }
            }
            other => other,
        }
    }

    pub fn family(&self) -> Family {
        match self {
            DistributionSpec::Uniform { .. } => Family::Uniform,
            DistributionSpec::Normal { .. } => Family::Normal,
            DistributionSpec::TruncatedNormal { .. } => Family::TruncatedNormal,
            DistributionSpec::CensoredNormal { .. } => Family::CensoredNormal,
            DistributionSpec::FoldedNormal { .. } => Family::FoldedNormal,
            DistributionSpec::Triangular { .. } => Family::Triangular,
            DistributionSpec::GaussianMixture2 { .. } => Family::GaussianMixture2,
        }
    }

    /// Named parameters in canonical order. Unbounded clip sides are omitted.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        let clip = |out: &mut Vec<(&'static str, f64)>, c: &Clip| {
            if c.lo.is_finite() {
                out.push(("lo", c.lo));
            }
            if c.hi.is_finite() {
                out.push(("hi", c.hi));
            }
        };
        match self {
            DistributionSpec::Uniform { lo, hi } => out.extend([("lo", *lo), ("hi", *hi)]),
            DistributionSpec::Normal { mu, sigma } => out.extend([("mu", *mu), ("sigma", *sigma)]),
            DistributionSpec::TruncatedNormal { mu, sigma, lo, hi }
            | DistributionSpec::CensoredNormal { mu, sigma, lo, hi } => {
                out.extend([("mu", *mu), ("sigma", *sigma), ("lo", *lo), ("hi", *hi)])
            }
            DistributionSpec::FoldedNormal { mu, sigma, clip: c } => {
                out.extend([("mu", *mu), ("sigma", *sigma)]);
                clip(&mut out, c);
            }
            DistributionSpec::Triangular { a, b, c, clip: cl } => {
                out.extend([("a", *a), ("b", *b), ("c", *c)]);
                clip(&mut out, cl);
            }
            DistributionSpec::GaussianMixture2 { mu1, sigma1, mu2, sigma2, kappa } => out.extend([
                ("mu1", *mu1),
                ("sigma1", *sigma1),
                ("mu2", *mu2),
                ("sigma2", *sigma2),
                ("kappa", *kappa),
            ]),
        }
        out
    }

    /// Builds a spec from named parameters. Structure only; see [`validate`](Self::validate).
    pub fn from_params(family: Family, params: &BTreeMap<String, f64>) -> Result<Self> {
        let (required, optional) = family.param_names();
        if let Some(unknown) = params
            .keys()
            .find(|k| !required.contains(&k.as_str()) && !optional.contains(&k.as_str()))
        {
            return Err(Error::param(unknown, "unknown parameter for this family"));
        }
        let get = |name: &str| -> Result<f64> {
            params
                .get(name)
                .copied()
                .ok_or_else(|| Error::param(name, "missing"))
        };
        let clip = || Clip {
            lo: params.get("lo").copied().unwrap_or(f64::NEG_INFINITY),
            hi: params.get("hi").copied().unwrap_or(f64::INFINITY),
        };
        Ok(match family {
            Family::Uniform => DistributionSpec::Uniform { lo: get("lo")?, hi: get("hi")? },
            Family::Normal => DistributionSpec::Normal { mu: get("mu")?, sigma: get("sigma")? },
            Family::TruncatedNormal => DistributionSpec::TruncatedNormal {
                mu: get("mu")?,
                sigma: get("sigma")?,
                lo: get("lo")?,
                hi: get("hi")?,
            },
            Family::CensoredNormal => DistributionSpec::CensoredNormal {
                mu: get("mu")?,
                sigma: get("sigma")?,
                lo: get("lo")?,
                hi: get("hi")?,
            },
            Family::FoldedNormal => DistributionSpec::FoldedNormal {
                mu: get("mu")?,
                sigma: get("sigma")?,
                clip: clip(),
            },
            Family::Triangular => DistributionSpec::Triangular {
                a: get("a")?,
                b: get("b")?,
                c: get("c")?,
                clip: clip(),
            },
            Family::GaussianMixture2 => DistributionSpec::GaussianMixture2 {
                mu1: get("mu1")?,
                sigma1: get("sigma1")?,
                mu2: get("mu2")?,
                sigma2: get("sigma2")?,
                kappa: get("kappa")?,
            },
        })
    }

    /// Checks the family invariants, reporting the first violated one.
    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.params() {
            if !value.is_finite() {
                return Err(Error::param(name, "not a finite number"));
            }
        }
        match *self {
            DistributionSpec::Uniform { lo, hi } => {
                if lo > hi {
                    return Err(Error::param("hi", "lo <= hi violated"));
                }
            }
            DistributionSpec::Normal { sigma, .. } => check_scale("sigma", sigma)?,
            DistributionSpec::TruncatedNormal { sigma, lo, hi, .. }
            | DistributionSpec::CensoredNormal { sigma, lo, hi, .. } => {
                check_scale("sigma", sigma)?;
                check_bounds(lo, hi)?;
            }
            DistributionSpec::FoldedNormal { sigma, clip, .. } => {
                check_scale("sigma", sigma)?;
                check_bounds(clip.lo, clip.hi)?;
            }
            DistributionSpec::Triangular { a, b, c, clip } => {
                if !(a <= b && b <= c) {
                    return Err(Error::param("b", "a ≤ b ≤ c violated"));
                }
                check_bounds(clip.lo, clip.hi)?;
            }
            DistributionSpec::GaussianMixture2 { sigma1, sigma2, kappa, .. } => {
                check_scale("sigma1", sigma1)?;
                check_scale("sigma2", sigma2)?;
                if !(0.0..=1.0).contains(&kappa) {
                    return Err(Error::param("kappa", "mixing weight outside [0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// Smallest value the distribution can produce (may be `-inf`).
    pub fn support_min(&self) -> f64 {
        match *self {
            DistributionSpec::Uniform { lo, .. } => lo,
            DistributionSpec::Normal { mu, sigma } => {
                if sigma == 0.0 {
                    mu
                } else {
                    f64::NEG_INFINITY
                }
            }
            DistributionSpec::TruncatedNormal { lo, .. }
            | DistributionSpec::CensoredNormal { lo, .. } => lo,
            DistributionSpec::FoldedNormal { clip, .. } => clip.lo.max(0.0),
            DistributionSpec::Triangular { a, clip, .. } => clip.apply(a),
            DistributionSpec::GaussianMixture2 { .. } => f64::NEG_INFINITY,
        }
    }

    /// Largest value the distribution can produce (may be `inf`).
    pub fn support_max(&self) -> f64 {
        match *self {
            DistributionSpec::Uniform { hi, .. } => hi,
            DistributionSpec::Normal { mu, sigma } => {
                if sigma == 0.0 {
                    mu
                } else {
                    f64::INFINITY
                }
            }
            DistributionSpec::TruncatedNormal { hi, .. }
            | DistributionSpec::CensoredNormal { hi, .. } => hi,
            DistributionSpec::FoldedNormal { clip, .. } => clip.hi,
            DistributionSpec::Triangular { c, clip, .. } => clip.apply(c),
            DistributionSpec::GaussianMixture2 { .. } => f64::INFINITY,
        }
    }

    /// Draws one value. Each draw consumes a parameter-independent amount of
    /// randomness, so two specs of one family driven by the same stream use
    /// common random numbers.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            DistributionSpec::Normal { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                mu + sigma * z
            }
            DistributionSpec::CensoredNormal { mu, sigma, lo, hi } => {
                let z: f64 = rng.sample(StandardNormal);
                (mu + sigma * z).clamp(lo, hi)
            }
            DistributionSpec::TruncatedNormal { mu, sigma, lo, hi } => {
                truncated_normal_inverse(mu, sigma, lo, hi, rng.random::<f64>())
            }
            DistributionSpec::FoldedNormal { mu, sigma, clip } => {
                let z: f64 = rng.sample(StandardNormal);
                clip.apply((mu + sigma * z).abs())
            }
            DistributionSpec::Triangular { a, b, c, clip } => {
                clip.apply(triangular_inverse(a, b, c, rng.random::<f64>()))
            }
            DistributionSpec::GaussianMixture2 { mu1, sigma1, mu2, sigma2, kappa } => {
                let first = rng.random::<f64>() < kappa;
                let z: f64 = rng.sample(StandardNormal);
                if first {
                    mu1 + sigma1 * z
                } else {
                    mu2 + sigma2 * z
                }
            }
        }
    }

    /// `count` independent draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }

    /// Right-continuous CDF. Censored and clipped families jump at their bounds.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            DistributionSpec::Uniform { lo, hi } => {
                if x < lo {
                    0.0
                } else if x >= hi {
                    1.0
                } else {
                    (x - lo) / (hi - lo)
                }
            }
            DistributionSpec::Normal { mu, sigma } => normal_cdf_at(x, mu, sigma),
            DistributionSpec::CensoredNormal { mu, sigma, lo, hi } => {
                Clip::new(lo, hi).cdf(x, |x| normal_cdf_at(x, mu, sigma))
            }
            DistributionSpec::TruncatedNormal { mu, sigma, lo, hi } => {
                truncated_normal_cdf(x, mu, sigma, lo, hi)
            }
            DistributionSpec::FoldedNormal { mu, sigma, clip } => clip.cdf(x, |x| {
                if x < 0.0 {
                    0.0
                } else {
                    (normal_cdf_at(x, mu, sigma) - normal_cdf_at_left(-x, mu, sigma)).max(0.0)
                }
            }),
            DistributionSpec::Triangular { a, b, c, clip } => {
                clip.cdf(x, |x| triangular_cdf(x, a, b, c))
            }
            DistributionSpec::GaussianMixture2 { mu1, sigma1, mu2, sigma2, kappa } => {
                kappa * normal_cdf_at(x, mu1, sigma1) + (1.0 - kappa) * normal_cdf_at(x, mu2, sigma2)
            }
        }
    }
}

// P(X < x) for a possibly degenerate normal; differs from the CDF only at an atom.
fn normal_cdf_at_left(x: f64, mu: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        if x > mu {
            1.0
        } else {
            0.0
        }
    } else {
        normal_cdf((x - mu) / sigma)
    }
}

fn truncated_normal_inverse(mu: f64, sigma: f64, lo: f64, hi: f64, u: f64) -> f64 {
    if sigma == 0.0 {
        return mu.clamp(lo, hi);
    }
    let a = (lo - mu) / sigma;
    let b = (hi - mu) / sigma;
    let z = if a > 0.0 {
        // Upper tail: work with survival probabilities to keep precision.
        let (sa, sb) = (normal_sf(a), normal_sf(b));
        if sa - sb <= 0.0 {
            a
        } else {
            -normal_quantile(sb + u * (sa - sb))
        }
    } else {
        let (pa, pb) = (normal_cdf(a), normal_cdf(b));
        if pb - pa <= 0.0 {
            b
        } else {
            normal_quantile(pa + u * (pb - pa))
        }
    };
    (mu + sigma * z).clamp(lo, hi)
}

fn truncated_normal_cdf(x: f64, mu: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    if x < lo {
        return 0.0;
    }
    if x >= hi {
        return 1.0;
    }
    if sigma == 0.0 {
        return if x >= mu.clamp(lo, hi) { 1.0 } else { 0.0 };
    }
    let a = (lo - mu) / sigma;
    let b = (hi - mu) / sigma;
    let z = (x - mu) / sigma;
    let v = if a > 0.0 {
        let (sa, sb, sz) = (normal_sf(a), normal_sf(b), normal_sf(z));
        if sa - sb <= 0.0 {
            return if x >= lo { 1.0 } else { 0.0 };
        }
        (sa - sz) / (sa - sb)
    } else {
        let (pa, pb, pz) = (normal_cdf(a), normal_cdf(b), normal_cdf(z));
        if pb - pa <= 0.0 {
            return 0.0;
        }
        (pz - pa) / (pb - pa)
    };
    v.clamp(0.0, 1.0)
}

fn triangular_inverse(a: f64, b: f64, c: f64, u: f64) -> f64 {
    let width = c - a;
    if width <= 0.0 {
        return a;
    }
    let split = (b - a) / width;
    if u < split {
        a + libm::sqrt(u * width * (b - a))
    } else {
        c - libm::sqrt((1.0 - u) * width * (c - b))
    }
}

fn triangular_cdf(x: f64, a: f64, b: f64, c: f64) -> f64 {
    if x < a {
        0.0
    } else if x >= c {
        1.0
    } else if x <= b {
        // a < c here, and b > a whenever a <= x <= b with x < c unless x == a == b
        if b == a {
            0.0
        } else {
            (x - a) * (x - a) / ((c - a) * (b - a))
        }
    } else {
        1.0 - (c - x) * (c - x) / ((c - a) * (c - b))
    }
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    family: Family,
    params: BTreeMap<String, f64>,
}

impl From<DistributionSpec> for SpecRepr {
    fn from(spec: DistributionSpec) -> Self {
        SpecRepr {
            family: spec.family(),
            params: spec
                .params()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

impl TryFrom<SpecRepr> for DistributionSpec {
    type Error = Error;

    fn try_from(repr: SpecRepr) -> Result<Self> {
        let spec = DistributionSpec::from_params(repr.family, &repr.params)?;
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RandomState;

    fn mean(v: &[f64]) -> f64 {
        v.iter().sum::<f64>() / v.len() as f64
    }

    #[test]
    fn validate_examples() {
        assert!(DistributionSpec::uniform(0.0, 1.0).validate().is_ok());
        assert_eq!(
            DistributionSpec::triangular(1.0, 0.0, 2.0).validate(),
            Err(Error::param("b", "a ≤ b ≤ c violated"))
        );
        assert_eq!(
            DistributionSpec::normal(0.0, -0.1).validate(),
            Err(Error::param("sigma", "negative scale"))
        );
        assert!(DistributionSpec::censored_normal(0.5, 0.1, 1.0, 0.0)
            .validate()
            .is_err());
        assert!(DistributionSpec::gaussian_mixture2(0.0, 1.0, 1.0, 1.0, 1.2)
            .validate()
            .is_err());
        assert!(DistributionSpec::normal(f64::NAN, 1.0).validate().is_err());
        // degenerate uniform is a point mass
        assert!(DistributionSpec::uniform(0.3, 0.3).validate().is_ok());
    }

    #[test]
    fn censored_zero_scale_sits_on_bound() {
        let spec = DistributionSpec::censored_normal(2.0, 0.0, 0.0, 1.0);
        let mut rng = RandomState::seed_from_u64(0);
        assert_eq!(spec.sample(&mut rng, 3), [1.0, 1.0, 1.0]);
    }

    #[test]
    fn law_of_large_numbers() {
        let mut rng = RandomState::seed_from_u64(11);
        let u = DistributionSpec::uniform(0.0, 1.0).sample(&mut rng, 100_000);
        assert!((mean(&u) - 0.5).abs() < 0.01);
        let f = DistributionSpec::folded_normal(0.0, 1.0).sample(&mut rng, 100_000);
        let folded_mean = libm::sqrt(2.0 / core::f64::consts::PI);
        assert!((mean(&f) - folded_mean).abs() < 0.01);
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(DistributionSpec::uniform(0.0, 1.0).cdf(0.5), 0.5);
        assert_eq!(DistributionSpec::triangular(0.0, 0.5, 1.0).cdf(0.5), 0.5);
        let cens = DistributionSpec::censored_normal(0.0, 1.0, 0.0, 1.0);
        assert!((cens.cdf(0.0) - 0.5).abs() < 1e-15);
        assert_eq!(cens.cdf(-1e-9), 0.0);
        assert_eq!(cens.cdf(1.0), 1.0);
        assert!(cens.cdf(1.0 - 1e-12) < 0.85);
    }

    #[test]
    fn truncated_normal_has_no_atoms() {
        let spec = DistributionSpec::truncated_normal(-0.5, 1.0, 0.0, 1.0);
        assert_eq!(spec.cdf(0.0), 0.0);
        assert!((spec.cdf(1.0 - 1e-12) - 1.0).abs() < 1e-9);
        let mut rng = RandomState::seed_from_u64(3);
        for x in spec.sample(&mut rng, 10_000) {
            assert!((0.0..=1.0).contains(&x));
        }
        // far upper tail still samples inside the interval
        let tail = DistributionSpec::truncated_normal(0.0, 1.0, 30.0, 31.0);
        for x in tail.sample(&mut rng, 100) {
            assert!((30.0..=31.0).contains(&x), "{x}");
        }
        assert!(tail.cdf(30.01) > 0.2);
    }

    #[test]
    fn folded_and_clipped_cdf() {
        let f = DistributionSpec::folded_normal(0.19, 0.11).clipped(0.0, 1.0);
        assert_eq!(f.cdf(-0.1), 0.0);
        let want = normal_cdf((0.3 - 0.19) / 0.11) - normal_cdf((-0.3 - 0.19) / 0.11);
        assert!((f.cdf(0.3) - want).abs() < 1e-15);
        let t = DistributionSpec::triangular(-0.05, 0.21, 0.45).clipped(0.0, f64::INFINITY);
        // mass below zero collapses onto zero
        let atom = 0.05 * 0.05 / (0.5 * 0.26);
        assert!((t.cdf(0.0) - atom).abs() < 1e-15);
        assert_eq!(t.cdf(-1e-12), 0.0);
    }

    #[test]
    fn json_shape() {
        let spec = DistributionSpec::folded_normal(0.19, 0.11).clipped(0.0, 1.0);
        let repr = SpecRepr::from(spec);
        assert_eq!(repr.family, Family::FoldedNormal);
        assert_eq!(repr.params.len(), 4);
        let back = DistributionSpec::try_from(repr).unwrap();
        assert_eq!(back, spec);

        let mut bad = BTreeMap::new();
        bad.insert("mu".to_string(), 0.0);
        bad.insert("sigma".to_string(), 1.0);
        bad.insert("shape".to_string(), 1.0);
        let err = DistributionSpec::try_from(SpecRepr { family: Family::Normal, params: bad });
        assert!(matches!(err, Err(Error::InvalidParam { .. })));
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert_eq!("Folded_Normal".parse::<Family>().unwrap(), Family::FoldedNormal);
        assert!("beta".parse::<Family>().is_err());
    }
}
