//! The iterated integrals entering the main-term coefficients, written as
//! [`IntegralSpec`] data.
//!
//! Shorthand used below: `a = 1/13`, `b = 1/8.4`, and `gap(vars)` for
//! `1/(0.475 − Σ vars)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_nested, Factor, IntegralSpec, Level, Limit};

pub const LOW: f64 = 1.0 / 13.0;
pub const HIGH: f64 = 1.0 / 8.4;
pub const LEVEL: f64 = 0.475;
/// Default absolute tolerance for a whole named integral.
pub const TOLERANCE: f64 = 1e-9;

/// A sum of iterated integrals sharing one name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedIntegral {
    pub name: String,
    pub parts: Vec<IntegralSpec>,
}

impl NamedIntegral {
    pub fn evaluate(&self) -> Result<f64> {
        self.parts
            .iter()
            .map(|p| integrate_nested(p).map_err(Error::from))
            .sum()
    }
}

fn c(x: f64) -> Limit {
    Limit::constant(x)
}

fn recip(var: usize) -> Factor {
    Factor::ReciprocalPower { var, power: 1 }
}

fn gap(vars: &[usize]) -> Factor {
    Factor::ReciprocalGap {
        total: LEVEL,
        vars: vars.to_vec(),
    }
}

fn shifted_log(var: usize) -> Factor {
    Factor::ShiftedLog { var }
}

/// `5.175 − 13·Σ t_vars`
fn sieve_limit(constant: f64, vars: &[usize]) -> Limit {
    Limit::affine(constant, &vars.iter().map(|&v| (v, -13.0)).collect::<Vec<_>>())
}

fn spec(name: &str, levels: Vec<Level>) -> IntegralSpec {
    IntegralSpec::new(name, levels, TOLERANCE)
}

/// Outer pair for G and g: `∫_a^b dt₁/t₁ ∫_{t₁}^b dt₂/(t₂(0.475−t₁−t₂))`.
fn pair_low() -> Vec<Level> {
    vec![
        Level::new(c(LOW), c(HIGH), vec![recip(0)]),
        Level::new(Limit::var(0), c(HIGH), vec![recip(1), gap(&[0, 1])]),
    ]
}

/// Outer pair for H and h: `t₂` runs over `[b, 0.475 − 2/13 − t₁]`.
fn pair_high() -> Vec<Level> {
    vec![
        Level::new(c(LOW), c(HIGH), vec![recip(0)]),
        Level::new(
            c(HIGH),
            Limit::affine(LEVEL - 2.0 / 13.0, &[(0, -1.0)]),
            vec![recip(1), gap(&[0, 1])],
        ),
    ]
}

fn with_level(mut levels: Vec<Level>, level: Level) -> Vec<Level> {
    levels.push(level);
    levels
}

fn with_factor(mut levels: Vec<Level>, factor: Factor) -> Vec<Level> {
    levels.last_mut().expect("non-empty").factors.push(factor);
    levels
}

fn log_sieve_limit() -> Factor {
    Factor::LogAffine {
        constant: 5.175,
        slope: 13.0,
        vars: vec![0, 1],
    }
}

pub fn big_g() -> NamedIntegral {
    NamedIntegral {
        name: "G".into(),
        parts: vec![
            spec("G.1", pair_low()),
            spec(
                "G.2",
                with_level(
                    pair_low(),
                    Level::new(c(2.0), sieve_limit(5.175, &[0, 1]), vec![shifted_log(2)]),
                ),
            ),
        ],
    }
}

pub fn small_g() -> NamedIntegral {
    let outer = vec![
        Level::new(c(LOW), c(2.175 / 26.0), vec![recip(0)]),
        Level::new(
            Limit::var(0),
            Limit::affine(2.175 / 13.0, &[(0, -1.0)]),
            vec![recip(1), gap(&[0, 1])],
        ),
        Level::new(c(3.0), sieve_limit(5.175, &[0, 1]), vec![recip(2)]),
        Level::new(c(2.0), Limit::affine(-1.0, &[(2, 1.0)]), vec![shifted_log(3)]),
    ];
    NamedIntegral {
        name: "g".into(),
        parts: vec![
            spec("g.1", with_factor(pair_low(), log_sieve_limit())),
            spec("g.2", outer),
        ],
    }
}

pub fn big_h() -> NamedIntegral {
    NamedIntegral {
        name: "H".into(),
        parts: vec![
            spec("H.1", pair_high()),
            spec(
                "H.2",
                with_level(
                    pair_high(),
                    Level::new(c(2.0), sieve_limit(5.175, &[0, 1]), vec![shifted_log(2)]),
                ),
            ),
        ],
    }
}

pub fn small_h() -> NamedIntegral {
    NamedIntegral {
        name: "h".into(),
        parts: vec![spec("h.1", with_factor(pair_high(), log_sieve_limit()))],
    }
}

/// J (`top = 3.145`) and K (`top = 3.81`). The third term's upper limit
/// `3.175 − 13t` is read with `t = t₁`.
fn role_reversal(name: &str, top: f64) -> NamedIntegral {
    let single = vec![Level::new(c(LOW), c(1.0 / top), vec![recip(0), gap(&[0])])];
    let double = vec![
        Level::new(c(LOW), c(LEVEL - 3.0 / 13.0), vec![recip(0), gap(&[0])]),
        Level::new(c(2.0), sieve_limit(5.175, &[0]), vec![shifted_log(1)]),
    ];
    let triple = vec![
        Level::new(c(LOW), c(LEVEL - 5.0 / 13.0), vec![recip(0), gap(&[0])]),
        Level::new(c(2.0), sieve_limit(3.175, &[0]), vec![shifted_log(1)]),
        Level::new(
            Limit::affine(2.0, &[(1, 1.0)]),
            c(5.175),
            vec![recip(2), Factor::LogRatio { num: 2, den: 1 }],
        ),
    ];
    NamedIntegral {
        name: name.into(),
        parts: vec![
            spec(&format!("{name}.1"), single),
            spec(&format!("{name}.2"), double),
            spec(&format!("{name}.3"), triple),
        ],
    }
}

pub fn big_j() -> NamedIntegral {
    role_reversal("J", 3.145)
}

pub fn big_k() -> NamedIntegral {
    role_reversal("K", 3.81)
}

/// Looks up G, g, H, h, J or K.
pub fn named(name: &str) -> Result<NamedIntegral> {
    Ok(match name {
        "G" => big_g(),
        "g" => small_g(),
        "H" => big_h(),
        "h" => small_h(),
        "J" => big_j(),
        "K" => big_k(),
        other => return Err(Error::UnknownLabel(other.to_string())),
    })
}

/// `∫_a^b dt₁/t₁ ∫_{t₁}^b (1/t₂)(1/t₁ − 1/t₂) log(1/(8.4 t₂)) dt₂`, the
/// integral behind the `|E|` coefficient before the Buchstab bound.
pub fn product_set_integral() -> IntegralSpec {
    spec(
        "E",
        vec![
            Level::new(c(LOW), c(HIGH), vec![recip(0)]),
            Level::new(
                Limit::var(0),
                c(HIGH),
                vec![
                    recip(1),
                    Factor::ReciprocalDifference { small: 0, large: 1 },
                    Factor::LogScaledReciprocal { scale: 8.4, var: 1 },
                ],
            ),
        ],
    )
}

/// How the Buchstab factor inside L is treated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuchstabMode {
    /// Replace `w` by a constant bound.
    Bound(f64),
    /// Integrate the tabulated `w` itself.
    Exact,
}

/// The four-fold integral L.
pub fn four_prime_integral(mode: BuchstabMode) -> IntegralSpec {
    let w = match mode {
        BuchstabMode::Bound(value) => Factor::Constant { value },
        BuchstabMode::Exact => Factor::Buchstab {
            total: 1.0,
            vars: vec![0, 1, 2, 3],
            den: 1,
        },
    };
    spec(
        "L",
        vec![
            Level::new(c(LOW), c(HIGH), vec![recip(0)]),
            Level::new(
                Limit::var(0),
                c(HIGH),
                vec![Factor::ReciprocalPower { var: 1, power: 2 }],
            ),
            Level::new(Limit::var(1), c(HIGH), vec![recip(2)]),
            Level::new(
                c(HIGH),
                Limit::affine(LEVEL - 2.0 / 13.0, &[(2, -1.0)]),
                vec![recip(3), w],
            ),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::midpoint_depth2;

    #[test]
    fn unknown_name() {
        assert!(matches!(named("Q"), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn j_and_k_share_their_last_two_terms() {
        let (j, k) = (big_j(), big_k());
        assert_eq!(j.parts[1].levels, k.parts[1].levels);
        assert_eq!(j.parts[2].levels, k.parts[2].levels);
        assert_ne!(j.parts[0].levels, k.parts[0].levels);
    }

    #[test]
    fn depth_two_parts_match_midpoint_cubature() {
        for spec in [
            &big_g().parts[0],
            &big_h().parts[0],
            &small_h().parts[0],
            &small_g().parts[0],
            &product_set_integral(),
        ] {
            let nested = integrate_nested(spec).unwrap();
            let brute = midpoint_depth2(spec, 1000).unwrap();
            assert!((nested - brute).abs() < 1e-4, "{}: {nested} vs {brute}", spec.name);
        }
    }

    #[test]
    fn single_term_of_j_is_elementary() {
        // ∫ dt/(t(c−t)) = (1/c) log(t/(c−t))
        let part = &big_j().parts[0];
        let v = integrate_nested(part).unwrap();
        let anti = |t: f64| (t / (LEVEL - t)).ln() / LEVEL;
        let want = anti(1.0 / 3.145) - anti(LOW);
        assert!((v - want).abs() < 1e-10);
    }
}
