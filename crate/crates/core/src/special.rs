//! Linear-sieve functions `F`, `f` in the normalized forms
//! `F₀(s) = s·F(s)/(2e^γ)`, `f₀(s) = s·f(s)/(2e^γ)`, and the Buchstab
//! function `w(u)`.
//!
//! `F₀` and `f₀` are evaluated from their piecewise closed forms on
//! `(0, 7]` and `(0, 8]`; the inner integrals go through the adaptive
//! quadrature in [`crate::quadrature`]. `w` is tabulated once by trapezoid
//! accumulation of `u·w(u) = 1 + ∫₂ᵘ w(t−1) dt`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::{ConstantCheck, Direction};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_1d, integrate_nested, shifted_log_kernel, Factor, IntegralSpec, Level, Limit,
};

/// Absolute tolerance for each closed-form inner integral.
pub const INNER_TOL: f64 = 1e-11;

pub const UPPER_MAX_S: f64 = 7.0;
pub const LOWER_MAX_S: f64 = 8.0;

/// `∫₂^v log(t−1)/t dt`, zero for `v ≤ 2`.
pub fn shifted_log_integral(v: f64) -> Result<f64> {
    if v <= 2.0 {
        return Ok(0.0);
    }
    Ok(integrate_1d(shifted_log_kernel, 2.0, v, INNER_TOL)?)
}

/// `F₀(s)` for `0 < s ≤ 7`.
pub fn upper_f0(s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= UPPER_MAX_S) {
        return Err(Error::Domain {
            what: "s",
            value: s,
            valid: "(0, 7]",
        });
    }
    if s <= 3.0 {
        return Ok(1.0);
    }
    let mut v = 1.0 + shifted_log_integral(s - 1.0)?;
    if s > 5.0 {
        // ∫₂^{s−3} log(t−1)/t ∫_{t+2}^{s−1} (1/u) log((u−1)/(t+1)) du dt
        let spec = IntegralSpec::new(
            "F0 second correction",
            vec![
                Level::new(
                    Limit::constant(2.0),
                    Limit::constant(s - 3.0),
                    vec![Factor::ShiftedLog { var: 0 }],
                ),
                Level::new(
                    Limit::affine(2.0, &[(0, 1.0)]),
                    Limit::constant(s - 1.0),
                    vec![
                        Factor::ReciprocalPower { var: 1, power: 1 },
                        Factor::LogRatio { num: 1, den: 0 },
                    ],
                ),
            ],
            INNER_TOL,
        );
        v += integrate_nested(&spec)?;
    }
    Ok(v)
}

/// `f₀(s)` for `0 < s ≤ 8`.
pub fn lower_f0(s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= LOWER_MAX_S) {
        return Err(Error::Domain {
            what: "s",
            value: s,
            valid: "(0, 8]",
        });
    }
    if s <= 2.0 {
        return Ok(0.0);
    }
    let mut v = (s - 1.0).ln();
    if s <= 4.0 {
        return Ok(v);
    }
    // ∫₃^{s−1} (1/t) ∫₂^{t−1} log(u−1)/u du dt
    let second = IntegralSpec::new(
        "f0 first correction",
        vec![
            Level::new(
                Limit::constant(3.0),
                Limit::constant(s - 1.0),
                vec![Factor::ReciprocalPower { var: 0, power: 1 }],
            ),
            Level::new(
                Limit::constant(2.0),
                Limit::affine(-1.0, &[(0, 1.0)]),
                vec![Factor::ShiftedLog { var: 1 }],
            ),
        ],
        INNER_TOL,
    );
    v += integrate_nested(&second)?;
    if s > 6.0 {
        // ∫₂^{s−4} log(t−1)/t ∫_{t+2}^{s−2} (1/u) log((u−1)/(t+1)) log(s/(u+2)) du dt
        let third = IntegralSpec::new(
            "f0 second correction",
            vec![
                Level::new(
                    Limit::constant(2.0),
                    Limit::constant(s - 4.0),
                    vec![Factor::ShiftedLog { var: 0 }],
                ),
                Level::new(
                    Limit::affine(2.0, &[(0, 1.0)]),
                    Limit::constant(s - 2.0),
                    vec![
                        Factor::ReciprocalPower { var: 1, power: 1 },
                        Factor::LogRatio { num: 1, den: 0 },
                        Factor::LogQuotient {
                            numerator: s,
                            den: 1,
                            shift: 2.0,
                        },
                    ],
                ),
            ],
            INNER_TOL,
        );
        v += integrate_nested(&third)?;
    }
    Ok(v)
}

// ---------------------------------------------------------------------------
// Buchstab function
// ---------------------------------------------------------------------------

pub const BUCHSTAB_MAX_U: f64 = 64.0;
pub const BUCHSTAB_STEP: f64 = 1e-4;

/// `w(u)` on `[1, 64]`, tabulated on a uniform grid.
#[derive(Debug, Clone)]
pub struct Buchstab {
    step: f64,
    values: Vec<f64>,
}

impl Buchstab {
    /// Builds the table with grid spacing `step`; `1/step` must be an integer.
    pub fn with_step(step: f64) -> Result<Self> {
        let per_unit = (1.0 / step).round();
        if !(step > 0.0 && step <= 0.1) || ((1.0 / step) - per_unit).abs() > 1e-6 {
            return Err(Error::Domain {
                what: "step",
                value: step,
                valid: "1/k for integer k ≥ 10",
            });
        }
        let shift = per_unit as usize;
        let n = ((BUCHSTAB_MAX_U - 1.0) * per_unit).round() as usize;
        let node = |i: usize| 1.0 + i as f64 * step;
        let mut values = Vec::with_capacity(n + 1);
        for i in 0..=shift {
            values.push(1.0 / node(i));
        }
        let mut acc = 0.0;
        for i in shift + 1..=n {
            acc += 0.5 * step * (values[i - shift] + values[i - 1 - shift]);
            values.push((1.0 + acc) / node(i));
        }
        Ok(Self { step, values })
    }

    /// The process-wide table at the default step.
    pub fn shared() -> &'static Buchstab {
        static TABLE: OnceLock<Buchstab> = OnceLock::new();
        TABLE.get_or_init(|| Buchstab::with_step(BUCHSTAB_STEP).expect("default step is valid"))
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn w(&self, u: f64) -> Result<f64> {
        if !(1.0..=BUCHSTAB_MAX_U).contains(&u) {
            return Err(Error::Domain {
                what: "u",
                value: u,
                valid: "[1, 64]",
            });
        }
        if u <= 2.0 {
            return Ok(1.0 / u);
        }
        let x = (u - 1.0) / self.step;
        let i = (x.floor() as usize).min(self.values.len() - 2);
        let frac = x - i as f64;
        Ok(self.values[i] + frac * (self.values[i + 1] - self.values[i]))
    }
}

/// `w(u)` from the shared table.
pub fn buchstab_w(u: f64) -> Result<f64> {
    Buchstab::shared().w(u)
}

/// The three published upper bounds for `w`: (label, lower end of the `u`
/// range, bound as printed).
pub const BUCHSTAB_BOUNDS: [(&str, f64, &str); 3] = [
    ("w<=1/1.763 on [2,64]", 2.0, "0.567214974475326"),
    ("w<0.5644 on [3,64]", 3.0, "0.5644"),
    ("w<0.5617 on [4,64]", 4.0, "0.5617"),
];

/// Checks the bounds at `u = 2, 2+step, …, 64`.
pub fn verify_buchstab_bounds(grid_step: f64) -> Result<Vec<ConstantCheck>> {
    if !(grid_step > 0.0 && grid_step <= 0.01) {
        return Err(Error::Domain {
            what: "grid_step",
            value: grid_step,
            valid: "(0, 0.01]",
        });
    }
    let n = ((BUCHSTAB_MAX_U - 2.0) / grid_step).floor() as usize;
    let points: Vec<f64> = (0..=n).map(|i| 2.0 + i as f64 * grid_step).collect();
    check_buchstab_bounds(&points)
}

/// Checks the bounds at arbitrary points; a bound with no points in its range
/// passes vacuously.
pub fn check_buchstab_bounds(points: &[f64]) -> Result<Vec<ConstantCheck>> {
    let table = Buchstab::shared();
    let mut maxima = [f64::NEG_INFINITY; 3];
    let mut argmax = [f64::NAN; 3];
    for &u in points {
        let w = table.w(u)?;
        for (k, (_, lo, _)) in BUCHSTAB_BOUNDS.iter().enumerate() {
            if u >= *lo && w > maxima[k] {
                maxima[k] = w;
                argmax[k] = u;
            }
        }
    }
    Ok(BUCHSTAB_BOUNDS
        .iter()
        .enumerate()
        .map(|(k, (label, _, bound))| {
            let (computed, note) = if maxima[k].is_finite() {
                (maxima[k], format!("max at u = {:.4}", argmax[k]))
            } else {
                (0.0, "no grid points in range".to_string())
            };
            ConstantCheck::new(*label, computed, *bound, Direction::Upper, 0.0, note)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Tabulation
// ---------------------------------------------------------------------------

/// `F₀`, `f₀` and `w` sampled on uniform grids, with linear interpolation
/// between nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SieveCurveTable {
    pub step: f64,
    /// Abscissae `step, 2·step, …, 7` for `F₀`.
    pub upper_grid: Vec<f64>,
    pub upper_values: Vec<f64>,
    /// Abscissae `step, 2·step, …, 8` for `f₀`.
    pub lower_grid: Vec<f64>,
    pub lower_values: Vec<f64>,
    /// Abscissae `1, 1+step, …, 64` for `w`.
    pub u_grid: Vec<f64>,
    pub w_values: Vec<f64>,
    /// Absolute error bound per entry.
    pub tolerance: f64,
}

impl SieveCurveTable {
    pub fn build(step: f64) -> Result<Self> {
        if !(step > 0.0 && step <= 0.1) {
            return Err(Error::Domain {
                what: "step",
                value: step,
                valid: "(0, 0.1]",
            });
        }
        let grid = |top: f64, start: f64| -> Vec<f64> {
            let n = ((top - start) / step).round() as usize;
            (0..=n).map(|i| start + i as f64 * step).collect()
        };
        let mut upper_grid = grid(UPPER_MAX_S, step);
        let mut lower_grid = grid(LOWER_MAX_S, step);
        *upper_grid.last_mut().unwrap() = UPPER_MAX_S;
        *lower_grid.last_mut().unwrap() = LOWER_MAX_S;
        let upper_values = upper_grid
            .par_iter()
            .map(|&s| upper_f0(s))
            .collect::<Result<Vec<_>>>()?;
        let lower_values = lower_grid
            .par_iter()
            .map(|&s| lower_f0(s))
            .collect::<Result<Vec<_>>>()?;
        let mut u_grid = grid(BUCHSTAB_MAX_U, 1.0);
        *u_grid.last_mut().unwrap() = BUCHSTAB_MAX_U;
        let w_values = u_grid
            .iter()
            .map(|&u| buchstab_w(u))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            step,
            upper_grid,
            upper_values,
            lower_grid,
            lower_values,
            u_grid,
            w_values,
            tolerance: 1e-6,
        })
    }

    pub fn upper(&self, s: f64) -> Result<f64> {
        if s > 0.0 && s <= 3.0 {
            return Ok(1.0);
        }
        lookup(&self.upper_grid, &self.upper_values, s, "s", "(0, 7]")
    }

    pub fn lower(&self, s: f64) -> Result<f64> {
        if s > 0.0 && s <= 2.0 {
            return Ok(0.0);
        }
        lookup(&self.lower_grid, &self.lower_values, s, "s", "(0, 8]")
    }

    pub fn w(&self, u: f64) -> Result<f64> {
        if (1.0..=2.0).contains(&u) {
            return Ok(1.0 / u);
        }
        lookup(&self.u_grid, &self.w_values, u, "u", "[1, 64]")
    }
}

fn lookup(grid: &[f64], values: &[f64], x: f64, what: &'static str, valid: &'static str) -> Result<f64> {
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    if !(x >= first && x <= last) {
        return Err(Error::Domain {
            what,
            value: x,
            valid,
        });
    }
    let i = grid.partition_point(|&g| g <= x).clamp(1, grid.len() - 1);
    let (x0, x1) = (grid[i - 1], grid[i]);
    let frac = (x - x0) / (x1 - x0);
    Ok(values[i - 1] + frac * (values[i] - values[i - 1]))
}
