//! Fast paths checked against slow, independently written references.

use proptest::prelude::*;
use raterpower_core::metrics::emd_1d;
use raterpower_core::power::{permutation_test_paired, wilcoxon_normal_approx, wilcoxon_signed_rank};
use raterpower_core::{estimate_p_value, RandomState};

mod common;

use common::{brute_p_value, brute_permutation, brute_wilcoxon, transport_lp};

fn eighths(max: i32) -> impl Strategy<Value = f64> {
    (-max..=max).prop_map(|k| k as f64 / 8.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn p_value_matches_double_loop(
        alt in prop::collection::vec(0i32..20, 1..=100),
        null in prop::collection::vec(0i32..20, 1..=100),
    ) {
        let alt: Vec<f64> = alt.into_iter().map(|v| v as f64 / 4.0).collect();
        let null: Vec<f64> = null.into_iter().map(|v| v as f64 / 4.0).collect();
        let got = estimate_p_value(&alt, &null).unwrap();
        let (p, dir) = brute_p_value(&alt, &null);
        prop_assert_eq!(got.p, p);
        prop_assert_eq!(got.direction, dir);
    }

    #[test]
    fn p_value_matches_double_loop_on_reals(
        alt in prop::collection::vec(-1.0f64..1.0, 1..=60),
        null in prop::collection::vec(-1.0f64..1.0, 1..=60),
    ) {
        let got = estimate_p_value(&alt, &null).unwrap();
        let (p, dir) = brute_p_value(&alt, &null);
        prop_assert_eq!(got.p, p);
        prop_assert_eq!(got.direction, dir);
    }

    #[test]
    fn emd_matches_transport_lp(
        x in prop::collection::vec(0i32..=16, 1..=6),
        y in prop::collection::vec(0i32..=16, 1..=6),
    ) {
        let x: Vec<f64> = x.into_iter().map(|v| v as f64 / 4.0).collect();
        let y: Vec<f64> = y.into_iter().map(|v| v as f64 / 4.0).collect();
        let got = emd_1d(&x, &y).unwrap();
        let want = transport_lp(&x, &y);
        prop_assert!((got - want).abs() <= 1e-12, "emd {} vs lp {}", got, want);
    }

    #[test]
    fn emd_equal_sizes_is_exact(
        pairs in prop::collection::vec((0i32..=16, 0i32..=16), 1..=6),
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64 / 4.0).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64 / 4.0).collect();
        if x.len().is_power_of_two() {
            // mass 1/n is dyadic, so the LP optimum is computed exactly
            prop_assert_eq!(emd_1d(&x, &y).unwrap(), transport_lp(&x, &y));
        }
    }

    #[test]
    fn wilcoxon_exact_matches_enumeration(d in prop::collection::vec(eighths(12), 1..=12)) {
        prop_assume!(d.iter().any(|&v| v != 0.0));
        prop_assert_eq!(wilcoxon_signed_rank(&d).unwrap(), brute_wilcoxon(&d));
    }

    #[test]
    fn permutation_exact_matches_enumeration(
        pairs in prop::collection::vec((eighths(16), eighths(16)), 1..=12),
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mut rng = RandomState::seed_from_u64(0);
        prop_assert_eq!(permutation_test_paired(&x, &y, 0, &mut rng).unwrap(), brute_permutation(&x, &y));
    }
}

#[test]
fn wilcoxon_normal_approximation_tracks_exact_at_twenty() {
    let mut rng = RandomState::seed_from_u64(11);
    use rand::Rng;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let shift = rng.random_range(-0.5..0.5);
        let d: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0) + shift).collect();
        let exact = wilcoxon_signed_rank(&d).unwrap();
        let approx = wilcoxon_normal_approx(&d).unwrap();
        worst = worst.max((exact - approx).abs());
    }
    assert!(worst < 0.02, "largest gap {worst}");
}

#[test]
fn wilcoxon_switches_to_the_approximation_above_twenty() {
    let d: Vec<f64> = (1..=25).map(|i| if i % 3 == 0 { -(i as f64) } else { i as f64 }).collect();
    assert_eq!(wilcoxon_signed_rank(&d).unwrap(), wilcoxon_normal_approx(&d).unwrap());
}

#[test]
fn transport_oracle_sanity() {
    assert_eq!(transport_lp(&[0.0], &[1.0]), 1.0);
    assert_eq!(transport_lp(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
    assert!((transport_lp(&[0.0, 1.0], &[0.5]) - 0.5).abs() < 1e-15);
}
