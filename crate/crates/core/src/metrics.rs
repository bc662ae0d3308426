//! Per-model scores against gold and the pairwise comparison metrics.
//!
//! Every comparison is oriented so that a positive value favours model `A`.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ResponseMatrix, Triple};
use crate::stats::{sort_floats, sorted};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricId {
    /// Mean absolute error difference.
    Mae,
    /// Item-wise wins of `A` over `B`.
    Wins,
    /// Mean earth mover's distance difference.
    Memd,
}

impl MetricId {
    pub const ALL: [MetricId; 3] = [MetricId::Mae, MetricId::Wins, MetricId::Memd];

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Mae => "mae",
            MetricId::Wins => "wins",
            MetricId::Memd => "memd",
        }
    }

    pub fn evaluate(self, triple: &Triple) -> Result<MetricResult> {
        let Triple { gold, a, b } = triple;
        match self {
            MetricId::Mae => {
                let sa = score_mae(a, gold)?;
                let sb = score_mae(b, gold)?;
                Ok(MetricResult::difference(self, sa, sb))
            }
            MetricId::Memd => {
                let sa = score_memd(a, gold)?;
                let sb = score_memd(b, gold)?;
                Ok(MetricResult::difference(self, sa, sb))
            }
            MetricId::Wins => gamma_wins(a, b, gold),
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mae" => Ok(MetricId::Mae),
            "wins" => Ok(MetricId::Wins),
            "memd" | "emd" => Ok(MetricId::Memd),
            _ => Err(Error::InvalidParam {
                name: "metric".to_string(),
                reason: alloc::format!("unknown metric `{s}`"),
            }),
        }
    }
}

/// Scores of both models under one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub metric: MetricId,
    pub score_a: f64,
    pub score_b: f64,
    /// `Gamma(A, B, G)`.
    pub comparison: f64,
    /// `|score_a - score_b|`.
    pub delta: f64,
    /// Fraction of tied items (`Wins` only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tie_fraction: Option<f64>,
}

impl MetricResult {
    fn difference(metric: MetricId, score_a: f64, score_b: f64) -> Self {
        MetricResult {
            metric,
            score_a,
            score_b,
            comparison: score_b - score_a,
            delta: (score_a - score_b).abs(),
            tie_fraction: None,
        }
    }
}

fn aligned_means(m: &ResponseMatrix, g: &ResponseMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    m.check_aligned(g)?;
    Ok((m.item_means()?, g.item_means()?))
}

fn mae_from_means(m: &[f64], g: &[f64]) -> f64 {
    m.iter().zip(g).map(|(x, y)| (x - y).abs()).sum::<f64>() / m.len() as f64
}

/// `(1/N) sum_i |mean(M_i) - mean(G_i)|`.
pub fn score_mae(m: &ResponseMatrix, g: &ResponseMatrix) -> Result<f64> {
    let (mm, gm) = aligned_means(m, g)?;
    Ok(mae_from_means(&mm, &gm))
}

/// `score_mae(B, G) - score_mae(A, G)`.
pub fn gamma_mae(a: &ResponseMatrix, b: &ResponseMatrix, g: &ResponseMatrix) -> Result<f64> {
    Ok(score_mae(b, g)? - score_mae(a, g)?)
}

fn wins_from_means(am: &[f64], bm: &[f64], gm: &[f64]) -> MetricResult {
    let (mut wa, mut wb) = (0usize, 0usize);
    for ((a, b), g) in am.iter().zip(bm).zip(gm) {
        let ea = (a - g).abs();
        let eb = (b - g).abs();
        if ea < eb {
            wa += 1;
        } else if eb < ea {
            wb += 1;
        }
    }
    let n = am.len() as f64;
    let (sa, sb) = (wa as f64 / n, wb as f64 / n);
    MetricResult {
        metric: MetricId::Wins,
        score_a: sa,
        score_b: sb,
        comparison: sa,
        delta: (sa - sb).abs(),
        tie_fraction: Some((am.len() - wa - wb) as f64 / n),
    }
}

/// Fraction of items where `A`'s mean is strictly closer to gold than `B`'s.
pub fn gamma_wins(a: &ResponseMatrix, b: &ResponseMatrix, g: &ResponseMatrix) -> Result<MetricResult> {
    a.check_aligned(g)?;
    b.check_aligned(g)?;
    Ok(wins_from_means(&a.item_means()?, &b.item_means()?, &g.item_means()?))
}

/// 1-Wasserstein distance between two sorted samples.
pub(crate) fn emd_sorted(x: &[f64], y: &[f64]) -> f64 {
    let (n, m) = (x.len(), y.len());
    if n == m {
        return x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum::<f64>() / n as f64;
    }
    // Integral of |F_x - F_y| between consecutive support points.
    let (mut i, mut j) = (0, 0);
    let mut prev = x[0].min(y[0]);
    let mut total = 0.0;
    while i < n || j < m {
        let xv = if i < n { x[i] } else { f64::INFINITY };
        let yv = if j < m { y[j] } else { f64::INFINITY };
        let next = xv.min(yv);
        let fx = i as f64 / n as f64;
        let fy = j as f64 / m as f64;
        total += (fx - fy).abs() * (next - prev);
        prev = next;
        while i < n && x[i] == next {
            i += 1;
        }
        while j < m && y[j] == next {
            j += 1;
        }
    }
    total
}

/// Earth mover's distance between the empirical distributions of `x` and `y`.
pub fn emd_1d(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(emd_sorted(&sorted(x), &sorted(y)))
}

fn sorted_items(m: &ResponseMatrix) -> Result<Vec<f64>> {
    m.check_nonempty()?;
    let mut values: Vec<f64> = (0..m.n_items()).flat_map(|i| m.item(i).iter().copied()).collect();
    let offsets = m.offsets();
    for i in 0..m.n_items() {
        sort_floats(&mut values[offsets[i]..offsets[i + 1]]);
    }
    Ok(values)
}

fn memd_from_sorted(m: &ResponseMatrix, ms: &[f64], g: &ResponseMatrix, gs: &[f64]) -> f64 {
    let (mo, go) = (m.offsets(), g.offsets());
    let total: f64 = (0..m.n_items())
        .map(|i| emd_sorted(&ms[mo[i]..mo[i + 1]], &gs[go[i]..go[i + 1]]))
        .sum();
    total / m.n_items() as f64
}

/// Mean item-wise EMD between `M` and gold.
pub fn score_memd(m: &ResponseMatrix, g: &ResponseMatrix) -> Result<f64> {
    m.check_aligned(g)?;
    let ms = sorted_items(m)?;
    let gs = sorted_items(g)?;
    Ok(memd_from_sorted(m, &ms, g, &gs))
}

/// `score_memd(B, G) - score_memd(A, G)`.
pub fn gamma_memd(a: &ResponseMatrix, b: &ResponseMatrix, g: &ResponseMatrix) -> Result<f64> {
    Ok(score_memd(b, g)? - score_memd(a, g)?)
}

/// Scores a triple under several metrics, sharing the per-item means and
/// sorted responses between them.
pub fn score_triple(metrics: &[MetricId], triple: &Triple) -> Result<Vec<MetricResult>> {
    let Triple { gold, a, b } = triple;
    gold.check_aligned(a)?;
    gold.check_aligned(b)?;
    if gold.is_empty() {
        return Err(Error::EmptySample);
    }
    let needs_means = metrics.iter().any(|m| matches!(m, MetricId::Mae | MetricId::Wins));
    let means = if needs_means {
        Some((a.item_means()?, b.item_means()?, gold.item_means()?))
    } else {
        None
    };
    let memd = if metrics.contains(&MetricId::Memd) {
        let gs = sorted_items(gold)?;
        let as_ = sorted_items(a)?;
        let bs = sorted_items(b)?;
        Some((memd_from_sorted(a, &as_, gold, &gs), memd_from_sorted(b, &bs, gold, &gs)))
    } else {
        None
    };
    Ok(metrics
        .iter()
        .map(|&metric| match metric {
            MetricId::Mae => {
                let (am, bm, gm) = means.as_ref().expect("means computed");
                MetricResult::difference(metric, mae_from_means(am, gm), mae_from_means(bm, gm))
            }
            MetricId::Wins => {
                let (am, bm, gm) = means.as_ref().expect("means computed");
                wins_from_means(am, bm, gm)
            }
            MetricId::Memd => {
                let (sa, sb) = memd.expect("memd computed");
                MetricResult::difference(metric, sa, sb)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn m(rows: &[&[f64]]) -> ResponseMatrix {
        ResponseMatrix::from_items(
            rows.iter()
                .enumerate()
                .map(|(i, r)| (alloc::format!("i{i}"), r.to_vec())),
        )
        .unwrap()
    }

    #[test]
    fn mae_examples() {
        let g = m(&[&[0.0, 1.0]]);
        assert_eq!(score_mae(&g, &g).unwrap(), 0.0);
        assert_eq!(score_mae(&m(&[&[1.0, 1.0]]), &g).unwrap(), 0.5);
        let g = m(&[&[0.0, 0.0]]);
        let a = m(&[&[0.0, 0.0]]);
        let b = m(&[&[1.0, 1.0]]);
        assert_eq!(gamma_mae(&a, &b, &g).unwrap(), 1.0);
        assert_eq!(gamma_mae(&a, &a, &g).unwrap(), 0.0);
        assert_eq!(gamma_mae(&b, &a, &g).unwrap(), -1.0);
    }

    #[test]
    fn wins_examples() {
        let g = m(&[&[0.0, 0.0]]);
        let a = m(&[&[0.0, 0.0]]);
        let b = m(&[&[1.0, 1.0]]);
        let same = gamma_wins(&a, &a, &g).unwrap();
        assert_eq!((same.score_a, same.score_b, same.tie_fraction), (0.0, 0.0, Some(1.0)));
        assert_eq!(gamma_wins(&a, &b, &g).unwrap().score_a, 1.0);

        let g = m(&[&[0.5], &[0.5]]);
        let a = m(&[&[0.5], &[0.9]]);
        let b = m(&[&[0.8], &[0.5]]);
        let r = gamma_wins(&a, &b, &g).unwrap();
        assert_eq!((r.score_a, r.score_b, r.comparison), (0.5, 0.5, 0.5));
    }

    #[test]
    fn emd_examples() {
        assert_eq!(emd_1d(&[0.2, 0.7], &[0.7, 0.2]).unwrap(), 0.0);
        assert_eq!(emd_1d(&[0.0], &[1.0]).unwrap(), 1.0);
        assert_eq!(emd_1d(&[0.0, 1.0], &[1.0, 1.0]).unwrap(), 0.5);
        // unequal sizes: point mass at 0 vs {0, 1}: half the mass moves 1
        assert_eq!(emd_1d(&[0.0], &[0.0, 1.0]).unwrap(), 0.5);
        assert_eq!(emd_1d(&[], &[1.0]), Err(Error::EmptySample));
    }

    #[test]
    fn memd_examples() {
        let g = m(&[&[0.0, 0.0]]);
        let a = m(&[&[0.0, 0.0]]);
        let b = m(&[&[1.0, 1.0]]);
        assert_eq!(gamma_memd(&a, &a, &g).unwrap(), 0.0);
        assert_eq!(gamma_memd(&a, &b, &g).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_ids_fail() {
        let g = m(&[&[0.0]]);
        let other = ResponseMatrix::from_items([("zz", vec![0.0])]).unwrap();
        assert!(matches!(score_mae(&other, &g), Err(Error::ItemMismatch { .. })));
    }

    #[test]
    fn score_triple_matches_individual_metrics() {
        let g = m(&[&[0.1, 0.4, 0.3], &[0.9, 1.0, 0.8]]);
        let a = m(&[&[0.2, 0.4, 0.1], &[0.7, 1.0, 1.0]]);
        let b = m(&[&[0.6, 0.5, 0.9], &[0.2, 0.3, 0.8]]);
        let t = Triple::new(g.clone(), a.clone(), b.clone()).unwrap();
        let all = score_triple(&MetricId::ALL, &t).unwrap();
        for r in all {
            assert_eq!(r, r.metric.evaluate(&t).unwrap());
        }
        assert_eq!(
            MetricId::Memd.evaluate(&t).unwrap().comparison,
            gamma_memd(&a, &b, &g).unwrap()
        );
    }

    #[test]
    fn metric_names_parse() {
        for id in MetricId::ALL {
            assert_eq!(id.name().parse::<MetricId>().unwrap(), id);
        }
        assert!("accuracy".parse::<MetricId>().is_err());
    }
}
