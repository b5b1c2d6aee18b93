//! Adaptive Gauss–Kronrod quadrature, a nested evaluator for iterated
//! integrals with affine variable limits, and the chain recursion used for
//! the almost-prime densities `c_k`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special::Buchstab;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("integrand is not finite at t = {at} (level {level})")]
    NonFinite { at: f64, level: usize },

    #[error("no convergence: estimate {value} with error {error} exceeds tolerance {tol}")]
    NotConverged { value: f64, error: f64, tol: f64 },

    #[error("reversed interval [{a}, {b}]")]
    Reversed { a: f64, b: f64 },

    #[error("invalid tolerance {0}")]
    Tolerance(f64),

    #[error("invalid integral spec `{name}`: {reason}")]
    Spec { name: String, reason: String },

    #[error("limit at level {level} is not finite")]
    Limit { level: usize },
}

// 15-point Kronrod abscissae and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Absolute error target.
    pub tol: f64,
    pub max_segments: usize,
    /// Integrate `b < a` as `-∫_b^a` instead of failing.
    pub allow_reversed: bool,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_segments: 4000,
            allow_reversed: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F, E>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    resasc *= half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    Ok((value, error))
}

/// Globally adaptive bisection driven by the largest local error estimate.
pub fn integrate_fallible<F, E>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<Estimate, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadError>,
{
    if !(opts.tol > 0.0) {
        return Err(QuadError::Tolerance(opts.tol).into());
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if b < a {
        if !opts.allow_reversed {
            return Err(QuadError::Reversed { a, b }.into());
        }
        let est = integrate_fallible(f, b, a, opts)?;
        return Ok(Estimate {
            value: -est.value,
            ..est
        });
    }

    let (value, error) = kronrod15(&mut f, a, b)?;
    let mut evaluations = 15;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;

    loop {
        let floor = 64.0 * f64::EPSILON * total.abs();
        if total_err <= opts.tol.max(floor) {
            break;
        }
        if heap.len() >= opts.max_segments {
            return Err(QuadError::NotConverged {
                value: total,
                error: total_err,
                tol: opts.tol,
            }
            .into());
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot bisect further in floating point; keep what we have.
            heap.push(Segment {
                error: 0.0,
                ..worst
            });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = kronrod15(&mut f, worst.a, mid)?;
        let (v2, e2) = kronrod15(&mut f, mid, worst.b)?;
        evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // Re-sum to shed the drift from incremental updates.
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// `∫_a^b f` to absolute tolerance `tol`. Non-finite integrand values are
/// reported as errors rather than propagated into the estimate.
pub fn integrate_1d<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64, QuadError>
where
    F: FnMut(f64) -> f64,
{
    integrate_fallible(
        |t| {
            let v = f(t);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(QuadError::NonFinite { at: t, level: 0 })
            }
        },
        a,
        b,
        &QuadOptions::new(tol),
    )
    .map(|e| e.value)
}

/// `log(t - 1) / t`, the base kernel of every closed form in the linear sieve.
#[inline]
pub fn shifted_log_kernel(t: f64) -> f64 {
    (t - 1.0).ln() / t
}

// ---------------------------------------------------------------------------
// Nested integrals
// ---------------------------------------------------------------------------

/// `constant + Σ coeff · t_var` over outer integration variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Limit {
    pub constant: f64,
    #[serde(default)]
    pub terms: Vec<(usize, f64)>,
}

impl Limit {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            terms: Vec::new(),
        }
    }

    pub fn affine(c: f64, terms: &[(usize, f64)]) -> Self {
        Self {
            constant: c,
            terms: terms.to_vec(),
        }
    }

    /// The outer variable `t_var` itself.
    pub fn var(var: usize) -> Self {
        Self::affine(0.0, &[(var, 1.0)])
    }

    fn eval(&self, vars: &[f64]) -> f64 {
        self.constant
            + self
                .terms
                .iter()
                .map(|&(i, c)| c * vars[i])
                .sum::<f64>()
    }

    fn max_var(&self) -> Option<usize> {
        self.terms.iter().map(|&(i, _)| i).max()
    }
}

/// One multiplicative piece of a level's integrand. Variable indices refer to
/// integration levels, outermost first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Factor {
    Constant { value: f64 },
    /// `t^-power`
    ReciprocalPower { var: usize, power: i32 },
    /// `1 / (total - Σ t_vars)`
    ReciprocalGap { total: f64, vars: Vec<usize> },
    /// `log(t - 1) / t`
    ShiftedLog { var: usize },
    /// `log(constant - slope · Σ t_vars)`
    LogAffine {
        constant: f64,
        slope: f64,
        vars: Vec<usize>,
    },
    /// `log((t_num - 1) / (t_den + 1))`
    LogRatio { num: usize, den: usize },
    /// `log(numerator / (t_den + shift))`
    LogQuotient {
        numerator: f64,
        den: usize,
        shift: f64,
    },
    /// `1/t_small - 1/t_large`
    ReciprocalDifference { small: usize, large: usize },
    /// `log(1 / (scale · t))`
    LogScaledReciprocal { scale: f64, var: usize },
    /// `w((total - Σ t_vars) / t_den)` with the Buchstab function `w`.
    Buchstab {
        total: f64,
        vars: Vec<usize>,
        den: usize,
    },
}

impl Factor {
    fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Factor::Constant { value } => *value,
            Factor::ReciprocalPower { var, power } => vars[*var].powi(-*power),
            Factor::ReciprocalGap { total, vars: idx } => {
                1.0 / (total - idx.iter().map(|&i| vars[i]).sum::<f64>())
            }
            Factor::ShiftedLog { var } => shifted_log_kernel(vars[*var]),
            Factor::LogAffine {
                constant,
                slope,
                vars: idx,
            } => (constant - slope * idx.iter().map(|&i| vars[i]).sum::<f64>()).ln(),
            Factor::LogRatio { num, den } => ((vars[*num] - 1.0) / (vars[*den] + 1.0)).ln(),
            Factor::LogQuotient {
                numerator,
                den,
                shift,
            } => (numerator / (vars[*den] + shift)).ln(),
            Factor::ReciprocalDifference { small, large } => 1.0 / vars[*small] - 1.0 / vars[*large],
            Factor::LogScaledReciprocal { scale, var } => (1.0 / (scale * vars[*var])).ln(),
            Factor::Buchstab {
                total,
                vars: idx,
                den,
            } => {
                let u = (total - idx.iter().map(|&i| vars[i]).sum::<f64>()) / vars[*den];
                Buchstab::shared().w(u).unwrap_or(f64::NAN)
            }
        }
    }

    fn max_var(&self) -> usize {
        match self {
            Factor::Constant { .. } => 0,
            Factor::ReciprocalPower { var, .. }
            | Factor::ShiftedLog { var }
            | Factor::LogScaledReciprocal { var, .. } => *var,
            Factor::ReciprocalGap { vars, .. } | Factor::LogAffine { vars, .. } => {
                vars.iter().copied().max().unwrap_or(0)
            }
            Factor::LogRatio { num, den } => (*num).max(*den),
            Factor::LogQuotient { den, .. } => *den,
            Factor::ReciprocalDifference { small, large } => (*small).max(*large),
            Factor::Buchstab { vars, den, .. } => vars.iter().copied().max().unwrap_or(0).max(*den),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub lower: Limit,
    pub upper: Limit,
    pub factors: Vec<Factor>,
}

impl Level {
    pub fn new(lower: Limit, upper: Limit, factors: Vec<Factor>) -> Self {
        Self {
            lower,
            upper,
            factors,
        }
    }
}

/// An iterated integral `∫ w₁(t₁) ∫ w₂(t₁,t₂) … dt`, outermost level first.
/// Ranges with `upper <= lower` contribute zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralSpec {
    pub name: String,
    pub levels: Vec<Level>,
    pub tolerance: f64,
}

pub const MAX_DEPTH: usize = 4;

impl IntegralSpec {
    pub fn new(name: impl Into<String>, levels: Vec<Level>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            levels,
            tolerance,
        }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn validate(&self) -> Result<(), QuadError> {
        let bad = |reason: String| QuadError::Spec {
            name: self.name.clone(),
            reason,
        };
        if self.levels.is_empty() || self.levels.len() > MAX_DEPTH {
            return Err(bad(format!("depth {} not in 1..={MAX_DEPTH}", self.levels.len())));
        }
        if !(self.tolerance > 0.0) {
            return Err(bad(format!("tolerance {} must be positive", self.tolerance)));
        }
        for (i, level) in self.levels.iter().enumerate() {
            for lim in [&level.lower, &level.upper] {
                if lim.max_var().is_some_and(|v| v >= i) {
                    return Err(bad(format!("limit at level {i} refers to an inner variable")));
                }
            }
            if level.factors.iter().any(|f| f.max_var() > i) {
                return Err(bad(format!("factor at level {i} refers to an inner variable")));
            }
        }
        Ok(())
    }
}

fn eval_level(
    spec: &IntegralSpec,
    level: usize,
    vars: &mut [f64; MAX_DEPTH],
    opts: &QuadOptions,
) -> Result<f64, QuadError> {
    let lv = &spec.levels[level];
    let lo = lv.lower.eval(&vars[..level]);
    let hi = lv.upper.eval(&vars[..level]);
    if !lo.is_finite() || !hi.is_finite() {
        return Err(QuadError::Limit { level });
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let mut outer = *vars;
    integrate_fallible(
        |t| {
            outer[level] = t;
            let mut v = 1.0;
            for f in &lv.factors {
                v *= f.eval(&outer[..=level]);
            }
            if !v.is_finite() {
                return Err(QuadError::NonFinite { at: t, level });
            }
            if level + 1 < spec.levels.len() && v != 0.0 {
                v *= eval_level(spec, level + 1, &mut outer, opts)?;
            }
            Ok(v)
        },
        lo,
        hi,
        opts,
    )
    .map(|e| e.value)
}

/// Evaluates an iterated integral, each level adaptive to
/// `tolerance / 3^depth`.
pub fn integrate_nested(spec: &IntegralSpec) -> Result<f64, QuadError> {
    spec.validate()?;
    let opts = QuadOptions::new(spec.tolerance / 3f64.powi(spec.depth() as i32));
    let mut vars = [0.0; MAX_DEPTH];
    eval_level(spec, 0, &mut vars, &opts)
}

/// Midpoint-rule cubature for depth-2 specs with `n × n` cells on the
/// bounding box of the inner range. Used as an independent cross-check.
pub fn midpoint_depth2(spec: &IntegralSpec, n: usize) -> Result<f64, QuadError> {
    spec.validate()?;
    if spec.depth() != 2 {
        return Err(QuadError::Spec {
            name: spec.name.clone(),
            reason: "midpoint oracle needs depth 2".into(),
        });
    }
    let (l0, l1) = (&spec.levels[0], &spec.levels[1]);
    let a = l0.lower.eval(&[]);
    let b = l0.upper.eval(&[]);
    if b <= a {
        return Ok(0.0);
    }
    let h0 = (b - a) / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        let t1 = a + (i as f64 + 0.5) * h0;
        let mut vars = [t1, 0.0];
        let w1: f64 = l0.factors.iter().map(|f| f.eval(&vars[..1])).product();
        let lo = l1.lower.eval(&vars[..1]);
        let hi = l1.upper.eval(&vars[..1]);
        if hi <= lo {
            continue;
        }
        let h1 = (hi - lo) / n as f64;
        let mut inner = 0.0;
        for j in 0..n {
            vars[1] = lo + (j as f64 + 0.5) * h1;
            inner += l1.factors.iter().map(|f| f.eval(&vars)).product::<f64>();
        }
        sum += w1 * inner * h1;
    }
    Ok(sum * h0)
}

// ---------------------------------------------------------------------------
// Chain recursion
// ---------------------------------------------------------------------------

/// Iterated chain `A₁(v) = ∫₂^v log(t−1)/t dt`,
/// `A_j(v) = ∫_{j+1}^v A_{j−1}(t−1)/t dt`, tabulated on a uniform grid up to
/// `top`. The chain density `c_k` is `A_{k−2}(top)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainFamily {
    pub top: f64,
    pub step: f64,
}

impl Default for ChainFamily {
    fn default() -> Self {
        Self {
            top: 199.0,
            step: 0.05,
        }
    }
}

/// Precomputed `c_k = A_{k−2}(top)` for every `k` with a non-empty range.
#[derive(Debug, Clone)]
pub struct ChainTable {
    family: ChainFamily,
    /// `tops[j] = A_j(top)`, index 0 unused.
    tops: Vec<f64>,
}

const GL5_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

impl ChainTable {
    pub fn build(family: ChainFamily) -> Result<Self, QuadError> {
        let per_unit = (1.0 / family.step).round();
        if !(family.step > 0.0) || ((1.0 / family.step) - per_unit).abs() > 1e-9 {
            return Err(QuadError::Spec {
                name: "chain".into(),
                reason: format!("step {} must divide 1", family.step),
            });
        }
        let shift = per_unit as usize;
        let n = ((family.top - 2.0) / family.step).round() as usize;
        let h = family.step;
        let node = |i: usize| 2.0 + i as f64 * h;

        // A₁ exactly on the grid, cell by cell.
        let mut prev = vec![0.0; n + 1];
        for i in 1..=n {
            prev[i] = prev[i - 1] + integrate_1d(shifted_log_kernel, node(i - 1), node(i), 1e-14)?;
        }
        let a1_grid = prev.clone();
        let a1_exact = |v: f64| -> Result<f64, QuadError> {
            if v <= 2.0 {
                return Ok(0.0);
            }
            let i = (((v - 2.0) / h).floor() as usize).min(n);
            Ok(a1_grid[i] + integrate_1d(shifted_log_kernel, node(i), v, 1e-14)?)
        };

        let mut tops = vec![0.0, prev[n]];
        let max_j = (family.top - 1.0).floor() as usize;
        for j in 2..=max_j {
            let mut next = vec![0.0; n + 1];
            // A_j vanishes below j+1; start accumulating at node index of j+1.
            let start = (j - 1) * shift;
            for i in start.max(1)..=n {
                let (a, b) = (node(i - 1), node(i));
                let mut cell = 0.0;
                for (x, w) in GL5_X.iter().zip(GL5_W) {
                    let t = 0.5 * (a + b) + 0.5 * h * x;
                    let inner = if j == 2 {
                        a1_exact(t - 1.0)?
                    } else {
                        interpolate_cubic(&prev, (t - 1.0 - 2.0) / h)
                    };
                    cell += w * inner / t;
                }
                next[i] = next[i - 1] + 0.5 * h * cell;
            }
            tops.push(next[n]);
            prev = next;
        }
        Ok(Self { family, tops })
    }

    pub fn family(&self) -> ChainFamily {
        self.family
    }

    /// `c_k`; zero once the outermost range `[k−1, top]` is empty.
    pub fn c(&self, k: usize) -> f64 {
        if k < 3 {
            return 0.0;
        }
        self.tops.get(k - 2).copied().unwrap_or(0.0)
    }
}

/// Four-point Lagrange interpolation on unit-spaced samples at fractional
/// index `x`; values left of the table are zero.
fn interpolate_cubic(values: &[f64], x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let last = values.len() - 1;
    let i = (x.floor() as usize).min(last - 1);
    let base = i.saturating_sub(1).min(last.saturating_sub(3));
    let u = x - base as f64;
    let y = &values[base..base + 4];
    let (u0, u1, u2, u3) = (u, u - 1.0, u - 2.0, u - 3.0);
    -y[0] * u1 * u2 * u3 / 6.0 + y[1] * u0 * u2 * u3 / 2.0 - y[2] * u0 * u1 * u3 / 2.0
        + y[3] * u0 * u1 * u2 / 6.0
}

pub const CHAIN_K_MIN: usize = 15;
pub const CHAIN_K_MAX: usize = 199;
