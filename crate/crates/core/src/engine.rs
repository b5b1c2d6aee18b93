//! Segmented Ω-sieve and the almost-prime counting functions
//! `π_{1,a,b}`, `D_{1,a,b}`, `π_{1,r}`, `D_{1,r}` and `D_{s,r}`.
//!
//! `Ω(n)` is obtained per segment by multiplying every prime power
//! `p^k ≤ hi` (with `p ≤ √hi`) into a running product; a segment entry whose
//! product falls short of `n` has exactly one remaining prime factor.
//!
//! An almost-prime `P_r` here is an integer `n ≥ 2` with `Ω(n) ≤ r`. The
//! value `n = 1` is never counted; whenever that choice changes a count the
//! result records it in `unit_exclusions`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{c2, c3, singular_series_cn};
use crate::error::{Error, Result};
use crate::primes::{isqrt, primes_up_to};

/// Largest range accepted by [`sieve_omega`].
pub const SEGMENT_CAP: u64 = 1 << 24;
/// Work-unit length for the counting sweeps.
pub const WORK_UNIT: u64 = 1 << 20;
pub const MAX_N: u64 = 10_000_000_000;
/// Largest offset any query looks ahead of `n`.
const MAX_OFFSET: u64 = 6;

fn sieving_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| primes_up_to(isqrt(MAX_N + MAX_OFFSET) + 1))
}

/// `Ω(n)` for consecutive integers starting at `base`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaSegment {
    pub base: u64,
    pub omegas: Vec<u8>,
}

impl OmegaSegment {
    pub fn omega(&self, n: u64) -> Option<u8> {
        n.checked_sub(self.base)
            .and_then(|i| self.omegas.get(i as usize).copied())
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }
}

/// Ω over `[lo, lo + len)`, `lo ≥ 1`, using primes up to `√(lo+len−1)`.
fn omega_block(lo: u64, len: usize) -> Vec<u8> {
    let mut omegas = vec![0u8; len];
    if len == 0 {
        return omegas;
    }
    let hi = lo + len as u64 - 1;
    let mut product = vec![1u64; len];
    let root = isqrt(hi);
    for &p in sieving_primes() {
        if p > root {
            break;
        }
        let mut pk = p;
        loop {
            let first = lo.div_ceil(pk) * pk;
            let mut m = first;
            while m <= hi {
                let i = (m - lo) as usize;
                omegas[i] += 1;
                product[i] *= p;
                m += pk;
            }
            match pk.checked_mul(p) {
                Some(next) if next <= hi => pk = next,
                _ => break,
            }
        }
    }
    for (i, (om, prod)) in omegas.iter_mut().zip(&product).enumerate() {
        if *prod != lo + i as u64 {
            *om += 1;
        }
    }
    omegas
}

/// Exact `Ω(n)` for every `n` in `[lo, hi]`.
pub fn sieve_omega(lo: u64, hi: u64) -> Result<OmegaSegment> {
    if lo < 2 || hi < lo || hi > MAX_N + MAX_OFFSET {
        return Err(Error::Domain {
            what: "hi",
            value: hi as f64,
            valid: "2 <= lo <= hi <= 1e10",
        });
    }
    let requested = hi - lo + 1;
    if requested > SEGMENT_CAP {
        return Err(Error::Capacity {
            requested,
            cap: SEGMENT_CAP,
        });
    }
    Ok(OmegaSegment {
        base: lo,
        omegas: omega_block(lo, requested as usize),
    })
}

/// `Ω(n)` of a single integer by trial division.
pub fn omega_of(mut n: u64) -> u8 {
    let mut count = 0;
    for &p in sieving_primes() {
        if p * p > n {
            break;
        }
        while n.is_multiple_of(p) {
            n /= p;
            count += 1;
        }
    }
    if n > 1 {
        count += 1;
    }
    count
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountKind {
    #[serde(rename = "pi_1ab")]
    Pi1ab,
    #[serde(rename = "D_1ab")]
    D1ab,
    #[serde(rename = "pi_1r")]
    Pi1r,
    #[serde(rename = "D_1r")]
    D1r,
    #[serde(rename = "D_sr")]
    Dsr,
}

impl CountKind {
    pub fn name(self) -> &'static str {
        match self {
            CountKind::Pi1ab => "pi_1ab",
            CountKind::D1ab => "D_1ab",
            CountKind::Pi1r => "pi_1r",
            CountKind::D1r => "D_1r",
            CountKind::Dsr => "D_sr",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "pi_1ab" => CountKind::Pi1ab,
            "D_1ab" => CountKind::D1ab,
            "pi_1r" => CountKind::Pi1r,
            "D_1r" => CountKind::D1r,
            "D_sr" => CountKind::Dsr,
            _ => return None,
        })
    }

    pub fn is_binary(self) -> bool {
        matches!(self, CountKind::D1ab | CountKind::D1r | CountKind::Dsr)
    }
}

/// A counting query. Parameter meaning depends on the kind:
/// `pi_1ab`/`D_1ab` use `(a, b)`, `pi_1r`/`D_1r` use `r`, `D_sr` uses `(s, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Query {
    #[serde(rename = "pi_1ab")]
    Pi1ab { x: u64, a: u32, b: u32 },
    #[serde(rename = "D_1ab")]
    D1ab { n: u64, a: u32, b: u32 },
    #[serde(rename = "pi_1r")]
    Pi1r { x: u64, r: u32 },
    #[serde(rename = "D_1r")]
    D1r { n: u64, r: u32 },
    #[serde(rename = "D_sr")]
    Dsr { n: u64, s: u32, r: u32 },
}

impl Query {
    /// Builds a query from a kind, a size and one or two parameters. The
    /// second parameter is ignored by the one-parameter kinds.
    pub fn new(kind: CountKind, size: u64, p: u32, q: u32) -> Self {
        match kind {
            CountKind::Pi1ab => Query::Pi1ab { x: size, a: p, b: q },
            CountKind::D1ab => Query::D1ab { n: size, a: p, b: q },
            CountKind::Pi1r => Query::Pi1r { x: size, r: p },
            CountKind::D1r => Query::D1r { n: size, r: p },
            CountKind::Dsr => Query::Dsr { n: size, s: p, r: q },
        }
    }

    pub fn kind(&self) -> CountKind {
        match self {
            Query::Pi1ab { .. } => CountKind::Pi1ab,
            Query::D1ab { .. } => CountKind::D1ab,
            Query::Pi1r { .. } => CountKind::Pi1r,
            Query::D1r { .. } => CountKind::D1r,
            Query::Dsr { .. } => CountKind::Dsr,
        }
    }

    pub fn size(&self) -> u64 {
        match *self {
            Query::Pi1ab { x, .. } | Query::Pi1r { x, .. } => x,
            Query::D1ab { n, .. } | Query::D1r { n, .. } | Query::Dsr { n, .. } => n,
        }
    }

    fn with_size(self, size: u64) -> Self {
        match self {
            Query::Pi1ab { a, b, .. } => Query::Pi1ab { x: size, a, b },
            Query::D1ab { a, b, .. } => Query::D1ab { n: size, a, b },
            Query::Pi1r { r, .. } => Query::Pi1r { x: size, r },
            Query::D1r { r, .. } => Query::D1r { n: size, r },
            Query::Dsr { s, r, .. } => Query::Dsr { n: size, s, r },
        }
    }

    fn validate(&self) -> Result<()> {
        let size = self.size();
        let min = if matches!(self, Query::D1ab { .. }) { 8 } else { 4 };
        if size < min || size > MAX_N {
            return Err(Error::Domain {
                what: "size",
                value: size as f64,
                valid: if min == 8 { "[8, 1e10]" } else { "[4, 1e10]" },
            });
        }
        if self.kind().is_binary() && size % 2 == 1 {
            return Err(Error::Parity {
                what: "N",
                value: size,
            });
        }
        let params: &[u32] = match self {
            Query::Pi1ab { a, b, .. } | Query::D1ab { a, b, .. } => &[*a, *b],
            Query::Pi1r { r, .. } | Query::D1r { r, .. } => &[*r],
            Query::Dsr { s, r, .. } => &[*s, *r],
        };
        if params.contains(&0) {
            return Err(Error::Domain {
                what: "parameter",
                value: 0.0,
                valid: ">= 1",
            });
        }
        Ok(())
    }

    fn conditions(&self) -> Conditions {
        let cap = |v: u32| v.min(u8::MAX as u32) as u8;
        match *self {
            Query::Pi1ab { a, b, .. } => Conditions {
                base_max: 1,
                forward: vec![(2, cap(a)), (6, cap(b))],
                mirror: None,
            },
            Query::D1ab { n, a, b } => Conditions {
                base_max: 1,
                forward: vec![(6, cap(b))],
                mirror: Some((n, cap(a))),
            },
            Query::Pi1r { r, .. } => Conditions {
                base_max: 1,
                forward: vec![(2, cap(r))],
                mirror: None,
            },
            Query::D1r { n, r } => Conditions {
                base_max: 1,
                forward: vec![],
                mirror: Some((n, cap(r))),
            },
            Query::Dsr { n, s, r } => Conditions {
                base_max: cap(s),
                forward: vec![],
                mirror: Some((n, cap(r))),
            },
        }
    }

    /// Main-term predictor.
    pub fn predictor(&self) -> Result<f64> {
        let size = self.size() as f64;
        let log = size.ln();
        let loglog = log.ln();
        let pow = |e: u32| loglog.powi(e as i32);
        Ok(match *self {
            Query::Pi1ab { a, .. } => c3() * size / log.powi(3) * pow(a.saturating_sub(2)),
            Query::D1ab { a, .. } => size / log.powi(3) * pow(a.saturating_sub(2)),
            Query::Pi1r { r, .. } => c2() * size / log.powi(2) * pow(r.saturating_sub(2)),
            Query::D1r { n, r } => {
                singular_series_cn(n)? * size / log.powi(2) * pow(r.saturating_sub(2))
            }
            Query::Dsr { n, s, r } => {
                singular_series_cn(n)? * size / log.powi(2) * pow((s + r).saturating_sub(3))
            }
        })
    }
}

/// Predicates on `Ω(n)`, `Ω(n + offset)` and `Ω(N − n)`.
#[derive(Debug, Clone)]
struct Conditions {
    base_max: u8,
    forward: Vec<(u64, u8)>,
    mirror: Option<(u64, u8)>,
}

impl Conditions {
    /// Largest `n` the sweep visits.
    fn top(&self, size: u64) -> u64 {
        match self.mirror {
            Some((n, _)) => n - 2,
            None => size,
        }
    }

    fn max_offset(&self) -> u64 {
        self.forward.iter().map(|&(o, _)| o).max().unwrap_or(0)
    }

    /// Count over `n ∈ [lo, hi]`, `lo ≥ 2`.
    fn count_range(&self, lo: u64, hi: u64) -> u64 {
        if hi < lo {
            return 0;
        }
        let len = (hi - lo + 1) as usize;
        let ahead = self.max_offset() as usize;
        let forward = omega_block(lo, len + ahead);
        let mirror = self.mirror.map(|(n, max)| (omega_block(n - hi, len), max));
        let mut count = 0;
        for i in 0..len {
            let om = forward[i];
            if om > self.base_max {
                continue;
            }
            if self
                .forward
                .iter()
                .any(|&(o, max)| forward[i + o as usize] > max)
            {
                continue;
            }
            if let Some((ref block, max)) = mirror {
                // N − n for n = lo + i sits at index len − 1 − i.
                if block[len - 1 - i] > max {
                    continue;
                }
            }
            count += 1;
        }
        count
    }

    /// Cases dropped only because `1` is not an almost-prime.
    fn unit_exclusions(&self) -> u64 {
        let Some((n, max)) = self.mirror else {
            return 0;
        };
        let mut dropped = 0;
        // n' = N − 1 paired with N − n' = 1.
        let m = n - 1;
        if omega_of(m) <= self.base_max
            && self.forward.iter().all(|&(o, fmax)| omega_of(m + o) <= fmax)
        {
            dropped += 1;
        }
        // n' = 1 paired with N − 1, only reachable when the base may be composite.
        if self.base_max > 1 && self.forward.is_empty() && omega_of(n - 1) <= max {
            dropped += 1;
        }
        dropped
    }

    /// Parallel count over `[2, top]`, split into work units.
    fn count_upto(&self, top: u64) -> u64 {
        count_between(self, 2, top)
    }
}

fn count_between(cond: &Conditions, lo: u64, hi: u64) -> u64 {
    if hi < lo {
        return 0;
    }
    let units = (hi - lo) / WORK_UNIT + 1;
    (0..units)
        .into_par_iter()
        .map(|u| {
            let start = lo + u * WORK_UNIT;
            let end = (start + WORK_UNIT - 1).min(hi);
            cond.count_range(start, end)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleCountResult {
    pub query: Query,
    pub count: u64,
    pub predicted: f64,
    pub ratio: f64,
    /// Configurations dropped because `1` is not counted as an almost-prime.
    pub unit_exclusions: u64,
}

impl TripleCountResult {
    fn new(query: Query, count: u64) -> Result<Self> {
        let predicted = query.predictor()?;
        Ok(Self {
            query,
            count,
            predicted,
            ratio: count as f64 / predicted,
            unit_exclusions: query.conditions().unit_exclusions(),
        })
    }
}

/// Runs one counting query.
pub fn count(query: Query) -> Result<TripleCountResult> {
    query.validate()?;
    let cond = query.conditions();
    let total = cond.count_upto(cond.top(query.size()));
    TripleCountResult::new(query, total)
}

/// `π_{1,a,b}(x)`: primes `p ≤ x` with `Ω(p+2) ≤ a`, `Ω(p+6) ≤ b`.
pub fn count_pi_1ab(x: u64, a: u32, b: u32) -> Result<TripleCountResult> {
    count(Query::Pi1ab { x, a, b })
}

/// `D_{1,a,b}(N)`: primes `p ≤ N − 2` with `Ω(N−p) ≤ a`, `Ω(p+6) ≤ b`.
pub fn count_d_1ab(n: u64, a: u32, b: u32) -> Result<TripleCountResult> {
    count(Query::D1ab { n, a, b })
}

/// `π_{1,r}`, `D_{1,r}` or `D_{s,r}`; `s` is ignored except for `D_sr`.
pub fn count_chen_variants(kind: CountKind, size: u64, s: u32, r: u32) -> Result<TripleCountResult> {
    let query = match kind {
        CountKind::Pi1r => Query::Pi1r { x: size, r },
        CountKind::D1r => Query::D1r { n: size, r },
        CountKind::Dsr => Query::Dsr { n: size, s, r },
        other => {
            return Err(Error::UnknownLabel(format!(
                "{} is not a Chen-type count",
                other.name()
            )))
        }
    };
    count(query)
}

pub const MAX_CHECKPOINT: u64 = 1_000_000_000;

/// Counts at each checkpoint. One-sided kinds are swept once with partial
/// sums at the checkpoints; two-sided kinds are recounted per checkpoint.
pub fn ratio_scan(kind: CountKind, a: u32, b: u32, checkpoints: &[u64]) -> Result<Vec<TripleCountResult>> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain {
            what: "checkpoints",
            value: f64::NAN,
            valid: "strictly ascending",
        });
    }
    if let Some(&last) = checkpoints.last() {
        if last > MAX_CHECKPOINT {
            return Err(Error::Domain {
                what: "checkpoint",
                value: last as f64,
                valid: "<= 1e9",
            });
        }
    }
    let template = Query::new(kind, 0, a, b);
    let queries: Vec<Query> = checkpoints.iter().map(|&x| template.with_size(x)).collect();
    for q in &queries {
        q.validate()?;
    }
    if kind.is_binary() {
        return queries.into_iter().map(count).collect();
    }
    let cond = template.conditions();
    let mut out = Vec::with_capacity(queries.len());
    let mut running = 0;
    let mut prev = 1;
    for q in queries {
        running += count_between(&cond, prev + 1, q.size());
        prev = q.size();
        out.push(TripleCountResult::new(q, running)?);
    }
    Ok(out)
}
