//! Small hand-checkable cases for every public operation.

use hltriple_core::bounds::{
    term_coefficient, verification_report, ReportMode, ReportOptions, TermManifest,
};
use hltriple_core::constants::{
    coefficient_e_with, constant_c2_truncated, constant_c3_truncated, singular_series_cn,
};
use hltriple_core::engine::{count, ratio_scan, CountKind, Query};
use hltriple_core::quadrature::{integrate_1d, integrate_fallible, shifted_log_kernel, QuadError, QuadOptions};
use hltriple_core::special::{buchstab_w, check_buchstab_bounds, lower_f0, upper_f0};
use hltriple_core::Error;

#[test]
fn sieve_function_trivial_values() {
    assert_eq!(upper_f0(2.0).unwrap(), 1.0);
    assert_eq!(lower_f0(1.5).unwrap(), 0.0);
    assert!((lower_f0(3.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
    assert!(matches!(upper_f0(7.01), Err(Error::Domain { .. })));
    assert!(matches!(lower_f0(8.01), Err(Error::Domain { .. })));
    assert!(matches!(upper_f0(0.0), Err(Error::Domain { .. })));
}

#[test]
fn buchstab_trivial_values() {
    assert!((buchstab_w(1.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((buchstab_w(2.0).unwrap() - 0.5).abs() < 1e-15);
    assert!(matches!(buchstab_w(0.9), Err(Error::Domain { .. })));
    let single = check_buchstab_bounds(&[2.0]).unwrap();
    assert!(single.iter().all(|c| c.passed()));
    assert_eq!(single[0].computed, 0.5);
    let at_three = check_buchstab_bounds(&[3.0]).unwrap();
    assert!(at_three[1].passed());
    assert!(0.5644 - at_three[1].computed < 2e-5);
}

#[test]
fn one_dimensional_quadrature() {
    assert_eq!(integrate_1d(shifted_log_kernel, 2.0, 2.0, 1e-12).unwrap(), 0.0);
    let ln2 = integrate_1d(|t| 1.0 / t, 1.0, 2.0, 1e-13).unwrap();
    assert!((ln2 - std::f64::consts::LN_2).abs() < 1e-13);
    assert!(integrate_1d(|t| t, 2.0, 1.0, 1e-10).is_err());
    let opts = QuadOptions {
        allow_reversed: true,
        ..QuadOptions::new(1e-12)
    };
    let rev = integrate_fallible::<_, QuadError>(Ok, 2.0, 1.0, &opts).unwrap();
    assert!((rev.value + 1.5).abs() < 1e-12);
    assert!(integrate_1d(|t| 1.0 / (t - 1.5), 1.0, 2.0, 1e-10).is_err());
}

#[test]
fn s61_inner_factor() {
    let inner = integrate_1d(shifted_log_kernel, 2.0, 2.145, 1e-13).unwrap();
    let s61 = 4.0 / (0.475 * 0.025) * inner * upper_f0(2.0).unwrap() * upper_f0(5.0).unwrap();
    assert!((s61 - term_coefficient("S61").unwrap()).abs() < 1e-9);
    assert!(((s61 - 2.27032) / 2.27032).abs() < 1e-3);
}

#[test]
fn euler_product_truncations() {
    assert!((constant_c3_truncated(5).value - 225.0 / 64.0).abs() < 1e-14);
    assert!((constant_c2_truncated(3).value - 1.5).abs() < 1e-15);
    let c4 = singular_series_cn(4).unwrap();
    for k in 3..40 {
        assert_eq!(singular_series_cn(1 << k).unwrap(), c4);
    }
    assert!((c4 - 0.660_162).abs() < 1e-6);
    assert!((singular_series_cn(6).unwrap() - 1.320_324).abs() < 2e-6);
}

#[test]
fn zero_buchstab_bound_kills_e() {
    assert_eq!(coefficient_e_with(0.0).unwrap(), 0.0);
}

#[test]
fn role_reversal_terms() {
    let s71 = term_coefficient("S71").unwrap();
    let s73 = term_coefficient("S73").unwrap();
    assert!((s71 / s73 - upper_f0(6.175).unwrap()).abs() < 1e-12);
    assert!((s71 / s73 - 1.73529).abs() < 2e-3);
    // At the published C₀ the term is exactly prefactor × C₀.
    let at_paper: f64 = 4.0 / (0.475 * 0.025) * 0.00408;
    assert!((at_paper - 1.37432).abs() < 1e-5);
    assert!(s73 < 1.37432);
    assert!(TermManifest::builtin().get("S00").is_err());
}

#[test]
fn paper_mode_passes_trivially() {
    let rows = verification_report(&ReportOptions {
        mode: ReportMode::PaperValues,
        tolerance: 1e-9,
        ..ReportOptions::default()
    })
    .unwrap();
    assert!(rows.iter().all(|r| r.passed()));
}

#[test]
fn counting_worked_cases() {
    assert_eq!(count(Query::Pi1ab { x: 4, a: 1, b: 1 }).unwrap().count, 0);
    assert_eq!(count(Query::D1ab { n: 8, a: 1, b: 1 }).unwrap().count, 1);
    assert_eq!(count(Query::D1r { n: 10, r: 1 }).unwrap().count, 3);
    assert_eq!(count(Query::D1r { n: 10, r: 2 }).unwrap().count, 3);
    let d30 = count(Query::D1ab { n: 30, a: 2, b: 2 }).unwrap();
    assert_eq!(d30.count, 7);
    assert_eq!(d30.unit_exclusions, 1);
}

#[test]
fn ratio_scan_small_checkpoints() {
    let scan = ratio_scan(CountKind::Pi1ab, 1, 1, &[10_000, 100_000, 1_000_000]).unwrap();
    for r in &scan {
        assert!(r.ratio > 0.0 && r.ratio < 100.0);
        assert!(r.count as f64 <= r.predicted * 100.0);
    }
    assert!(ratio_scan(CountKind::Pi1ab, 1, 1, &[]).unwrap().is_empty());
}
