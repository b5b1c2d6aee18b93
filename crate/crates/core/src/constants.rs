//! Euler products (`C₂`, `C₃`, `C(N)`) and the auxiliary constants of the
//! upper-bound terms: the chain sum `C₀` and the `|E|` and `L` coefficients.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{four_prime_integral, product_set_integral, BuchstabMode};
use crate::primes::{factorize, primes_up_to};
use crate::quadrature::{integrate_nested, ChainFamily, ChainTable, CHAIN_K_MAX, CHAIN_K_MIN};

pub const MIN_TRUNCATION: u64 = 100_000;
pub const MIN_TOLERANCE: f64 = 1e-8;

/// Buchstab bound used in the `|E|` coefficient (valid for `u ≥ 4`).
pub const E_BUCHSTAB_BOUND: f64 = 0.5617;
/// Buchstab bound used in L (valid for `u ≥ 3`).
pub const L_BUCHSTAB_BOUND: f64 = 0.5644;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerProductResult {
    pub value: f64,
    /// Largest prime included in the product.
    pub truncation_prime: u64,
    /// Estimated magnitude of the neglected tail.
    pub tail_bound: f64,
}

/// `Σ_{p>P} 4/p² ≤ ∫_P^∞ 4/(t² log t) dt ≤ 4/(P log P)`.
fn tail_estimate(limit: u64) -> f64 {
    let p = limit as f64;
    4.0 / (p * p.ln())
}

fn truncation_for(tol: f64) -> Result<u64> {
    if !(tol >= MIN_TOLERANCE) {
        return Err(Error::Domain {
            what: "tol",
            value: tol,
            valid: "[1e-8, ∞)",
        });
    }
    let target = tol.min(1e-6);
    let mut limit = MIN_TRUNCATION;
    while tail_estimate(limit) >= target {
        limit += limit / 4;
    }
    Ok(limit)
}

/// `lead · ∏_{first ≤ p ≤ limit} (1 − term(p))`, accumulated in log space.
fn euler_product(lead: f64, first: u64, limit: u64, term: impl Fn(f64) -> f64) -> EulerProductResult {
    let primes = primes_up_to(limit);
    let log_sum: f64 = primes
        .iter()
        .filter(|&&p| p >= first)
        .map(|&p| (-term(p as f64)).ln_1p())
        .sum();
    EulerProductResult {
        value: lead * log_sum.exp(),
        truncation_prime: primes.last().copied().unwrap_or(0),
        tail_bound: tail_estimate(limit.max(2)),
    }
}

fn c3_term(p: f64) -> f64 {
    (3.0 * p - 1.0) / (p - 1.0).powi(3)
}

fn c2_term(p: f64) -> f64 {
    1.0 / (p - 1.0).powi(2)
}

/// `(9/2) ∏_{3<p≤limit} (1 − (3p−1)/(p−1)³)`
pub fn constant_c3_truncated(limit: u64) -> EulerProductResult {
    euler_product(4.5, 5, limit, c3_term)
}

/// `C₃` with the truncation chosen so the tail estimate is below `tol`.
pub fn constant_c3(tol: f64) -> Result<EulerProductResult> {
    Ok(constant_c3_truncated(truncation_for(tol)?))
}

/// `2 ∏_{2<p≤limit} (1 − 1/(p−1)²)`
pub fn constant_c2_truncated(limit: u64) -> EulerProductResult {
    euler_product(2.0, 3, limit, c2_term)
}

pub fn constant_c2(tol: f64) -> Result<EulerProductResult> {
    Ok(constant_c2_truncated(truncation_for(tol)?))
}

/// Partial products of `C₃` as `(p, value after including p)`.
pub fn c3_partial_products(limit: u64) -> Vec<(u64, f64)> {
    let mut value = 4.5;
    primes_up_to(limit)
        .into_iter()
        .filter(|&p| p > 3)
        .map(|p| {
            value *= 1.0 - c3_term(p as f64);
            (p, value)
        })
        .collect()
}

fn shared_c2() -> f64 {
    static C2: OnceLock<f64> = OnceLock::new();
    *C2.get_or_init(|| constant_c2(1e-7).expect("valid tolerance").value)
}

fn shared_c3() -> f64 {
    static C3: OnceLock<f64> = OnceLock::new();
    *C3.get_or_init(|| constant_c3(1e-7).expect("valid tolerance").value)
}

/// `C₃` at tolerance `10⁻⁷`, computed once per process.
pub fn c3() -> f64 {
    shared_c3()
}

/// `C₂` at tolerance `10⁻⁷`, computed once per process.
pub fn c2() -> f64 {
    shared_c2()
}

pub const MAX_SINGULAR_N: u64 = 1_000_000_000_000;

/// `∏_{p|N, p>2} (p−1)/(p−2)`.
pub fn odd_divisor_factor(n: u64) -> f64 {
    factorize(n)
        .into_iter()
        .filter(|&(p, _)| p > 2)
        .map(|(p, _)| (p - 1) as f64 / (p - 2) as f64)
        .product()
}

/// `C(N) = ∏_{p|N, p>2} (p−1)/(p−2) · C₂/2` for even `4 ≤ N ≤ 10¹²`.
pub fn singular_series_cn(n: u64) -> Result<f64> {
    if n % 2 == 1 {
        return Err(Error::Parity { what: "N", value: n });
    }
    if !(4..=MAX_SINGULAR_N).contains(&n) {
        return Err(Error::Domain {
            what: "N",
            value: n as f64,
            valid: "[4, 1e12]",
        });
    }
    Ok(odd_divisor_factor(n) * shared_c2() / 2.0)
}

/// The chain table at the default grid, built once.
pub fn chain_table() -> Result<&'static ChainTable> {
    static TABLE: OnceLock<std::result::Result<ChainTable, Error>> = OnceLock::new();
    TABLE
        .get_or_init(|| ChainTable::build(ChainFamily::default()).map_err(Error::from))
        .as_ref()
        .map_err(Clone::clone)
}

/// `c_k` for `15 ≤ k ≤ 199`.
pub fn chain_value(table: &ChainTable, k: usize) -> Result<f64> {
    if !(CHAIN_K_MIN..=CHAIN_K_MAX).contains(&k) {
        return Err(Error::Domain {
            what: "k",
            value: k as f64,
            valid: "[15, 199]",
        });
    }
    Ok(table.c(k))
}

/// `C₀ = Σ_{k=15}^{199} c_k`.
pub fn constant_c0() -> Result<f64> {
    let table = chain_table()?;
    Ok((CHAIN_K_MIN..=CHAIN_K_MAX).map(|k| table.c(k)).sum())
}

/// `bound · ∫∫ …` for the `|E|` coefficient.
pub fn coefficient_e_with(bound: f64) -> Result<f64> {
    if bound == 0.0 {
        return Ok(0.0);
    }
    Ok(bound * integrate_nested(&product_set_integral())?)
}

/// The `|E|` coefficient with `w` replaced by 0.5617, computed once.
pub fn coefficient_e() -> Result<f64> {
    static E: OnceLock<Result<f64>> = OnceLock::new();
    E.get_or_init(|| coefficient_e_with(E_BUCHSTAB_BOUND)).clone()
}

pub fn coefficient_l_with(mode: BuchstabMode) -> Result<f64> {
    Ok(integrate_nested(&four_prime_integral(mode))?)
}

/// The L coefficient with `w` replaced by 0.5644, computed once.
pub fn coefficient_l() -> Result<f64> {
    static L: OnceLock<Result<f64>> = OnceLock::new();
    L.get_or_init(|| coefficient_l_with(BuchstabMode::Bound(L_BUCHSTAB_BOUND)))
        .clone()
}
