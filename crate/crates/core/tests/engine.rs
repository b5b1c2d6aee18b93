mod common;

use common::{brute_d_1ab, brute_d_sr, brute_pi_1ab, brute_pi_1r, omega_table, omega_trial};
use hltriple_core::engine::{
    count, count_chen_variants, count_d_1ab, count_pi_1ab, omega_of, ratio_scan, sieve_omega,
    CountKind, Query,
};
use proptest::prelude::*;

#[test]
fn sieve_matches_trial_division_up_to_1e5() {
    let seg = sieve_omega(2, 100_000).unwrap();
    for n in 2..=100_000u64 {
        assert_eq!(seg.omega(n).unwrap(), omega_trial(n), "n = {n}");
    }
}

#[test]
fn segmentation_does_not_change_omega() {
    let whole = sieve_omega(1_000_000, 1_100_000).unwrap();
    for cut in [1_000_001, 1_048_576, 1_099_999] {
        let left = sieve_omega(1_000_000, cut).unwrap();
        let right = sieve_omega(cut + 1, 1_100_000).unwrap();
        for n in (1_000_000..=1_100_000).step_by(13) {
            let split = if n <= cut { left.omega(n) } else { right.omega(n) };
            assert_eq!(whole.omega(n), split);
        }
    }
}

#[test]
fn small_examples() {
    assert_eq!(count_pi_1ab(100, 1, 1).unwrap().count, 4);
    assert_eq!(count_pi_1ab(30, 2, 2).unwrap().count, 9);
    assert_eq!(count_d_1ab(30, 2, 2).unwrap().count, 7);
    assert_eq!(count_chen_variants(CountKind::Pi1r, 20, 0, 1).unwrap().count, 4);
}

#[test]
fn counts_match_brute_force() {
    let omega = omega_table(10_020);
    for x in [4u64, 7, 10, 99, 100, 101, 1000, 4321, 10_000] {
        for a in 1..=3u32 {
            for b in 1..=3u32 {
                let got = count_pi_1ab(x, a, b).unwrap().count;
                assert_eq!(got, brute_pi_1ab(&omega, x, a as u8, b as u8), "x={x} a={a} b={b}");
            }
        }
        let r = count_chen_variants(CountKind::Pi1r, x, 0, 2).unwrap().count;
        assert_eq!(r, brute_pi_1r(&omega, x, 2));
    }
    for n in [8u64, 30, 100, 998, 10_000] {
        for a in 1..=3u32 {
            for b in 1..=3u32 {
                let got = count_d_1ab(n, a, b).unwrap().count;
                assert_eq!(got, brute_d_1ab(&omega, n, a as u8, b as u8), "N={n}");
            }
        }
        let d = count_chen_variants(CountKind::Dsr, n, 2, 2).unwrap().count;
        assert_eq!(d, brute_d_sr(&omega, n, 2, 2));
        let d1 = count_chen_variants(CountKind::D1r, n, 0, 2).unwrap().count;
        assert_eq!(d1, brute_d_sr(&omega, n, 1, 2));
    }
}

#[test]
fn prime_counting_limit() {
    // With a, b large the triple count is π(x).
    assert_eq!(count_pi_1ab(10_000, 100, 100).unwrap().count, 1229);
    assert_eq!(count_pi_1ab(1_000_000, 100, 100).unwrap().count, 78_498);
}

#[test]
fn goldbach_unit_exclusion_is_reported() {
    // N = 8: 7 + 1 would pair a prime with 1, which is not counted.
    let r = count_chen_variants(CountKind::D1r, 8, 0, 1).unwrap();
    assert_eq!(r.count, 2);
    assert_eq!(r.unit_exclusions, 1);
}

#[test]
fn ratio_scan_matches_direct_counts() {
    let checkpoints = [10_000u64, 1_048_577, 3_000_000];
    let scan = ratio_scan(CountKind::Pi1ab, 1, 2, &checkpoints).unwrap();
    for (r, &x) in scan.iter().zip(&checkpoints) {
        assert_eq!(r.count, count_pi_1ab(x, 1, 2).unwrap().count);
    }
    let d = ratio_scan(CountKind::D1ab, 2, 2, &[1000, 2000]).unwrap();
    assert_eq!(d[1].count, count_d_1ab(2000, 2, 2).unwrap().count);
    assert!(ratio_scan(CountKind::Pi1ab, 1, 1, &[100, 50]).is_err());
}

#[test]
fn invalid_queries_are_rejected() {
    assert!(count_pi_1ab(3, 1, 1).is_err());
    assert!(count_pi_1ab(100, 0, 1).is_err());
    assert!(count_d_1ab(31, 2, 2).is_err());
    assert!(count_d_1ab(6, 2, 2).is_err());
    assert!(count_pi_1ab(20_000_000_000, 1, 1).is_err());
    assert!(count_chen_variants(CountKind::Pi1ab, 100, 1, 1).is_err());
}

#[test]
fn query_serialization_round_trip() {
    let q = Query::Dsr { n: 100, s: 2, r: 3 };
    let json = serde_json::to_string(&q).unwrap();
    assert_eq!(json, r#"{"kind":"D_sr","n":100,"s":2,"r":3}"#);
    assert_eq!(serde_json::from_str::<Query>(&json).unwrap(), q);
    for kind in [CountKind::Pi1ab, CountKind::D1ab, CountKind::Pi1r, CountKind::D1r, CountKind::Dsr] {
        assert_eq!(CountKind::parse(kind.name()), Some(kind));
    }
}

proptest! {
    #[test]
    fn omega_of_matches_trial_division(n in 2u64..10_000_000_000) {
        prop_assert_eq!(omega_of(n), omega_trial(n));
    }

    #[test]
    fn omega_is_additive_on_products(m in 2u64..100_000, k in 2u64..100_000) {
        prop_assert_eq!(omega_of(m * k), omega_of(m) + omega_of(k));
    }

    #[test]
    fn nested_parameters_are_monotone(x in 4u64..5000, a in 1u32..4, b in 1u32..4) {
        let base = count(Query::Pi1ab { x, a, b }).unwrap().count;
        let wider_a = count(Query::Pi1ab { x, a: a + 1, b }).unwrap().count;
        let wider_b = count(Query::Pi1ab { x, a, b: b + 1 }).unwrap().count;
        let longer = count(Query::Pi1ab { x: x + 100, a, b }).unwrap().count;
        prop_assert!(wider_a >= base && wider_b >= base && longer >= base);
    }
}
