//! Invariants of the distributions, metrics and resampling.

use std::sync::Arc;

use proptest::prelude::*;
use raterpower_core::distributions::Clip;
use raterpower_core::inference::{build_null_pool, resample_multistage, sample_null_pair};
use raterpower_core::metrics::{emd_1d, score_triple};
use raterpower_core::simulator::generate_triple;
use raterpower_core::{
    run_experiment, DistributionSpec, Executor, ExperimentConfig, MetricId, RandomState, ResponseMatrix,
    SamplingStrategy, Sequential, Triple,
};

fn spec_strategy() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (-1.0f64..1.0, 0.0f64..1.0).prop_map(|(lo, w)| DistributionSpec::uniform(lo, lo + w)),
        (-1.0f64..1.0, 0.01f64..1.0).prop_map(|(m, s)| DistributionSpec::normal(m, s)),
        (-1.0f64..1.0, 0.05f64..1.0, -0.5f64..0.5, 0.1f64..1.0)
            .prop_map(|(m, s, lo, w)| DistributionSpec::truncated_normal(m, s, lo, lo + w)),
        (-1.0f64..1.0, 0.05f64..1.0, -0.5f64..0.5, 0.1f64..1.0)
            .prop_map(|(m, s, lo, w)| DistributionSpec::censored_normal(m, s, lo, lo + w)),
        (-1.0f64..1.0, 0.01f64..1.0).prop_map(|(m, s)| DistributionSpec::folded_normal(m, s)),
        (-1.0f64..0.0, 0.0f64..0.5, 0.0f64..0.5).prop_map(|(a, db, dc)| DistributionSpec::triangular(a, a + db, a + db + dc)),
        (0.0f64..1.0, 0.01f64..0.5, 0.0f64..1.0, 0.01f64..0.5, 0.0f64..1.0)
            .prop_map(|(m1, s1, m2, s2, k)| DistributionSpec::gaussian_mixture2(m1, s1, m2, s2, k)),
    ]
}

fn matrix_strategy(n: usize, k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0f64..=1.0, k), n)
}

fn triple_from(g: Vec<Vec<f64>>, a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Triple {
    let m = |rows: Vec<Vec<f64>>| {
        ResponseMatrix::from_items(rows.into_iter().enumerate().map(|(i, r)| (format!("i{i}"), r))).unwrap()
    };
    Triple::new(m(g), m(a), m(b)).unwrap()
}

fn triple_strategy() -> impl Strategy<Value = Triple> {
    (1usize..8, 1usize..6).prop_flat_map(|(n, k)| {
        (matrix_strategy(n, k), matrix_strategy(n, k), matrix_strategy(n, k))
            .prop_map(|(g, a, b)| triple_from(g, a, b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cdf_is_monotone_and_bounded(spec in spec_strategy(), xs in prop::collection::vec(-3.0f64..3.0, 2..40)) {
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        let mut last = 0.0;
        for x in xs {
            let f = spec.cdf(x);
            prop_assert!((0.0..=1.0).contains(&f), "{:?} cdf({}) = {}", spec, x, f);
            prop_assert!(f >= last - 1e-12, "{:?} not monotone at {}", spec, x);
            last = f;
        }
        prop_assert_eq!(spec.cdf(f64::INFINITY), 1.0);
    }

    #[test]
    fn samples_respect_support(spec in spec_strategy(), seed in any::<u64>()) {
        let mut rng = RandomState::seed_from_u64(seed);
        for x in spec.sample(&mut rng, 64) {
            prop_assert!(x >= spec.support_min() && x <= spec.support_max(), "{:?} drew {}", spec, x);
        }
    }

    #[test]
    fn clipping_bounds_samples(m in -1.0f64..1.0, s in 0.01f64..1.0, lo in -0.5f64..0.5, w in 0.0f64..1.0, seed in any::<u64>()) {
        let spec = DistributionSpec::folded_normal(m, s).clipped(lo, lo + w);
        prop_assert_eq!(spec.support_min().max(lo), spec.support_min());
        let mut rng = RandomState::seed_from_u64(seed);
        for x in spec.sample(&mut rng, 32) {
            prop_assert!((lo..=lo + w).contains(&x));
        }
        prop_assert!(Clip::NONE.lo.is_infinite());
    }

    #[test]
    fn emd_is_a_metric(
        x in prop::collection::vec(0.0f64..1.0, 1..8),
        y in prop::collection::vec(0.0f64..1.0, 1..8),
        z in prop::collection::vec(0.0f64..1.0, 1..8),
    ) {
        let dxy = emd_1d(&x, &y).unwrap();
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - emd_1d(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!(emd_1d(&x, &x).unwrap() < 1e-15);
        let dxz = emd_1d(&x, &z).unwrap();
        let dzy = emd_1d(&z, &y).unwrap();
        prop_assert!(dxy <= dxz + dzy + 1e-12);
    }

    #[test]
    fn metrics_ignore_item_and_response_order(t in triple_strategy(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = RandomState::seed_from_u64(seed);
        let n = t.gold.n_items();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let shuffle_rows = |m: &ResponseMatrix, rng: &mut RandomState| {
            let sel = m.select_items(&order);
            ResponseMatrix::from_items(sel.items().map(|(id, r)| {
                let mut r = r.to_vec();
                r.shuffle(rng);
                (id.to_string(), r)
            })).unwrap()
        };
        let g2 = shuffle_rows(&t.gold, &mut rng);
        let a2 = shuffle_rows(&t.a, &mut rng);
        let b2 = shuffle_rows(&t.b, &mut rng);
        let t2 = Triple::new(g2, a2, b2).unwrap();
        let r1 = score_triple(&MetricId::ALL, &t).unwrap();
        let r2 = score_triple(&MetricId::ALL, &t2).unwrap();
        for (x, y) in r1.iter().zip(&r2) {
            prop_assert!((x.comparison - y.comparison).abs() < 1e-12, "{:?} vs {:?}", x, y);
        }
    }

    #[test]
    fn swapping_models_flips_comparisons(t in triple_strategy()) {
        let r = score_triple(&MetricId::ALL, &t).unwrap();
        let s = score_triple(&MetricId::ALL, &t.swapped()).unwrap();
        prop_assert!((r[0].comparison + s[0].comparison).abs() < 1e-12);
        prop_assert!((r[2].comparison + s[2].comparison).abs() < 1e-12);
        // wins of A become wins of B; ties stay ties
        let ties = r[1].tie_fraction.unwrap();
        prop_assert!((r[1].comparison + s[1].comparison + ties - 1.0).abs() < 1e-12);
        prop_assert_eq!(r[1].score_b, s[1].score_a);
    }

    #[test]
    fn resampling_preserves_pairing(t in triple_strategy(), seed in any::<u64>()) {
        let mut rng = RandomState::seed_from_u64(seed);
        let same = resample_multistage(&t, SamplingStrategy::IDENTITY, &mut rng);
        prop_assert_eq!(&same, &t);
        let items = resample_multistage(&t, SamplingStrategy::ITEMS_ONLY, &mut rng);
        for j in 0..t.gold.n_items() {
            let id = items.gold.item_id(j);
            prop_assert_eq!(id, items.a.item_id(j));
            prop_assert_eq!(id, items.b.item_id(j));
            let src = t.gold.ids().iter().position(|s| s == id).unwrap();
            prop_assert_eq!(items.gold.item(j), t.gold.item(src));
            prop_assert_eq!(items.a.item(j), t.a.item(src));
            prop_assert_eq!(items.b.item(j), t.b.item(src));
        }
        let both = resample_multistage(&t, SamplingStrategy::MULTISTAGE, &mut rng);
        for j in 0..t.gold.n_items() {
            let src = t.gold.ids().iter().position(|s| s == both.gold.item_id(j)).unwrap();
            prop_assert_eq!(both.a.item(j).len(), t.a.item(src).len());
            prop_assert!(both.a.item(j).iter().all(|v| t.a.item(src).contains(v)));
            prop_assert!(both.gold.item(j).iter().all(|v| t.gold.item(src).contains(v)));
        }
    }

    #[test]
    fn null_draws_come_from_the_pool(t in triple_strategy(), seed in any::<u64>()) {
        let pool = build_null_pool(&t.a, &t.b).unwrap();
        let k = t.a.rectangular_width().unwrap();
        let (a, b) = sample_null_pair(&pool, k, &mut RandomState::seed_from_u64(seed)).unwrap();
        for i in 0..pool.n_items() {
            prop_assert_eq!(pool.item(i).len(), 2 * k);
            prop_assert!(a.item(i).iter().chain(b.item(i)).all(|v| pool.item(i).contains(v)));
        }
    }
}

#[test]
fn wins_ignores_nothing_but_ties() {
    let t = triple_from(vec![vec![0.5]], vec![vec![0.5]], vec![vec![0.5]]);
    let r = score_triple(&[MetricId::Wins], &t).unwrap();
    assert_eq!(r[0].comparison, 0.0);
    assert_eq!(r[0].tie_fraction, Some(1.0));
}

/// Runs items in reverse order, as a pool with adversarial scheduling might.
struct Reversed;

impl Executor for Reversed {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let mut out: Vec<(usize, T)> = (0..count).rev().map(|i| (i, f(i))).collect();
        out.reverse();
        out.into_iter().map(|(_, t)| t).collect()
    }
}

#[test]
fn reports_do_not_depend_on_scheduling() {
    let config = ExperimentConfig {
        n_items: 30,
        k_responses: 4,
        epsilon: 0.05,
        b_alt: 60,
        b_null: 60,
        seed: 99,
        ..ExperimentConfig::default()
    };
    let a = run_experiment(&config, &Sequential).unwrap();
    let b = run_experiment(&config, &Reversed).unwrap();
    assert_eq!(a, b);
    let other = run_experiment(&ExperimentConfig { seed: 100, ..config }, &Sequential).unwrap();
    assert_ne!(a, other);
}

#[test]
fn exchangeable_models_at_zero_epsilon() {
    // with epsilon = 0, A and B are draws from one distribution, so the mean
    // MAE comparison over many triples should vanish
    let config = ExperimentConfig {
        n_items: 50,
        k_responses: 5,
        ..ExperimentConfig::default()
    };
    let mut total = 0.0;
    let reps = 400;
    for s in 0..reps {
        let t = generate_triple(&config, &mut RandomState::seed_from_u64(s)).unwrap();
        total += score_triple(&[MetricId::Mae], &t).unwrap()[0].comparison;
    }
    let mean = total / reps as f64;
    assert!(mean.abs() < 0.002, "mean comparison {mean}");
    let _ = Arc::<[String]>::from(vec![]);
}
