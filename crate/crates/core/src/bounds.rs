//! Main-term coefficients of the weighted sieve, their combination into the
//! final lower-bound constant, and the verification report against the
//! published values.
//!
//! Every coefficient is reported relative to `C₃·x·log log x/(log x)³`.
//! Expanding `V(z) ~ e^{−γ}/log z`, `F(s) = 2e^γ F₀(s)/s` and
//! `s = log D/log z` turns each two-dimensional sieve main term into
//! `4/(δ₁δ₂) · extra · brace`, with `D_j = x^{δ_j}`.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::{ConstantCheck, Direction};
use crate::constants::{c3, coefficient_e, coefficient_l, constant_c0};
use crate::error::{Error, Result};
use crate::integrals;
use crate::quadrature::{integrate_1d, shifted_log_kernel};
use crate::special::{lower_f0, upper_f0, INNER_TOL};

const MANIFEST: &str = include_str!("terms.toml");

/// A decimal written as text, kept exact as `numerator / 10^scale`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Decimal(pub String);

impl Decimal {
    /// `(numerator, denominator)` with the denominator a power of ten.
    pub fn ratio(&self) -> Result<(u128, u128)> {
        let text = self.0.trim();
        let bad = || Error::Manifest(format!("`{text}` is not a positive decimal"));
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if int.is_empty() && frac.is_empty()
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
            || frac.len() > 18
        {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let num: u128 = digits.parse().map_err(|_| bad())?;
        Ok((num, 10u128.pow(frac.len() as u32)))
    }

    pub fn value(&self) -> Result<f64> {
        let (n, d) = self.ratio()?;
        Ok(n as f64 / d as f64)
    }
}

impl From<&str> for Decimal {
    fn from(s: &str) -> Self {
        Decimal(s.to_string())
    }
}

/// `4/(δ₁δ₂)`, computed from the exact decimals so that e.g. `δ = 0.2`
/// gives exactly 100.
pub fn scalarization(delta1: &Decimal, delta2: &Decimal) -> Result<f64> {
    let (n1, d1) = delta1.ratio()?;
    let (n2, d2) = delta2.ratio()?;
    if n1 == 0 || n2 == 0 {
        return Err(Error::Manifest("level exponent must be positive".into()));
    }
    Ok((4 * d1 * d2) as f64 / (n1 * n2) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtraFactor {
    One,
    Scalar { value: Decimal },
    /// The `|E|` coefficient.
    CoefficientE,
    /// The L coefficient.
    CoefficientL,
    /// `C₀ = Σ c_k`.
    ChainSum,
    /// `∫_lower^upper log(t−1)/t dt`
    ShiftedLog { lower: f64, upper: f64 },
    /// `∫_pivot^upper log(pivot − (pivot+1)/(t+1))/t dt`
    ReversalLog { pivot: f64, upper: f64 },
}

impl ExtraFactor {
    pub fn evaluate(&self) -> Result<f64> {
        match self {
            ExtraFactor::One => Ok(1.0),
            ExtraFactor::Scalar { value } => value.value(),
            ExtraFactor::CoefficientE => coefficient_e(),
            ExtraFactor::CoefficientL => coefficient_l(),
            ExtraFactor::ChainSum => constant_c0(),
            ExtraFactor::ShiftedLog { lower, upper } => {
                Ok(integrate_1d(shifted_log_kernel, *lower, *upper, INNER_TOL)?)
            }
            ExtraFactor::ReversalLog { pivot, upper } => {
                let p = *pivot;
                Ok(integrate_1d(
                    |t| (p - (p + 1.0) / (t + 1.0)).ln() / t,
                    p,
                    *upper,
                    INNER_TOL,
                )?)
            }
        }
    }
}

/// The sieve-function expression of a term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Brace {
    /// `f₀(s₁)F₀(s₂) + F₀(s₁)f₀(s₂) − F₀(s₁)F₀(s₂)`
    Lower { s1: f64, s2: f64 },
    /// `F₀(s₁)F₀(s₂)`
    Upper { s1: f64, s2: f64 },
    /// `f₀(s)·big + F₀(s)·small − F₀(s)·big` with named integrals.
    LowerIntegral { s: f64, big: String, small: String },
    /// `F₀(s)·integral`
    UpperIntegral { s: f64, integral: String },
}

impl Brace {
    pub fn has_lower_function(&self) -> bool {
        matches!(self, Brace::Lower { .. } | Brace::LowerIntegral { .. })
    }

    pub fn evaluate(&self) -> Result<f64> {
        match self {
            Brace::Lower { s1, s2 } => {
                let (l1, u1) = (lower_f0(*s1)?, upper_f0(*s1)?);
                let (l2, u2) = (lower_f0(*s2)?, upper_f0(*s2)?);
                Ok(l1 * u2 + u1 * l2 - u1 * u2)
            }
            Brace::Upper { s1, s2 } => Ok(upper_f0(*s1)? * upper_f0(*s2)?),
            Brace::LowerIntegral { s, big, small } => {
                let big = integrals::named(big)?.evaluate()?;
                let small = integrals::named(small)?.evaluate()?;
                let (l, u) = (lower_f0(*s)?, upper_f0(*s)?);
                Ok(l * big + u * small - u * big)
            }
            Brace::UpperIntegral { s, integral } => {
                Ok(upper_f0(*s)? * integrals::named(integral)?.evaluate()?)
            }
        }
    }
}

fn unit_weight() -> u32 {
    1
}

/// One main-term coefficient of the weighted sieve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundTerm {
    pub label: String,
    /// `lower` terms bound a positive contribution from below, `upper` terms
    /// bound a subtracted contribution from above.
    pub direction: Direction,
    #[serde(default = "unit_weight")]
    pub weight: u32,
    pub delta1: Decimal,
    pub delta2: Decimal,
    pub extra: ExtraFactor,
    pub brace: Brace,
    /// Published value as printed.
    pub paper: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEvaluation {
    pub label: String,
    pub prefactor: f64,
    pub extra: f64,
    pub brace: f64,
    pub coefficient: f64,
}

impl BoundTerm {
    pub fn evaluate(&self) -> Result<TermEvaluation> {
        let prefactor = scalarization(&self.delta1, &self.delta2)?;
        let extra = self.extra.evaluate()?;
        let brace = self.brace.evaluate()?;
        Ok(TermEvaluation {
            label: self.label.clone(),
            prefactor,
            extra,
            brace,
            coefficient: prefactor * extra * brace,
        })
    }

    pub fn paper_value(&self) -> f64 {
        self.paper.parse().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermManifest {
    #[serde(rename = "term")]
    pub terms: Vec<BoundTerm>,
}

impl TermManifest {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let manifest: TermManifest =
            toml::from_str(text).map_err(|e| Error::Manifest(e.to_string()))?;
        manifest.validate()?;
        Ok(manifest)
    }

    /// The sixteen terms of the decomposition, parsed once.
    pub fn builtin() -> &'static TermManifest {
        static BUILTIN: OnceLock<TermManifest> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            TermManifest::from_toml_str(MANIFEST).expect("embedded manifest is valid")
        })
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for t in &self.terms {
            if !seen.insert(t.label.as_str()) {
                return Err(Error::Manifest(format!("duplicate label {}", t.label)));
            }
            match (t.direction, t.brace.has_lower_function()) {
                (Direction::Lower, true) | (Direction::Upper, false) => {}
                (Direction::Value, _) => {
                    return Err(Error::Manifest(format!(
                        "{}: direction must be lower or upper",
                        t.label
                    )))
                }
                _ => {
                    return Err(Error::Manifest(format!(
                        "{}: brace does not match direction {}",
                        t.label, t.direction
                    )))
                }
            }
            scalarization(&t.delta1, &t.delta2)?;
            if t.paper.parse::<f64>().is_err() {
                return Err(Error::Manifest(format!("{}: paper value `{}`", t.label, t.paper)));
            }
        }
        Ok(())
    }

    pub fn get(&self, label: &str) -> Result<&BoundTerm> {
        self.terms
            .iter()
            .find(|t| t.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Evaluates every term, in manifest order.
    pub fn evaluate_all(&self) -> Result<Vec<TermEvaluation>> {
        self.terms.par_iter().map(BoundTerm::evaluate).collect()
    }

    /// Weighted lower and upper sums for coefficients given in manifest order.
    pub fn combine(&self, coefficients: &[f64]) -> Combination {
        let mut lower_sum = 0.0;
        let mut upper_sum = 0.0;
        for (t, c) in self.terms.iter().zip(coefficients) {
            let v = t.weight as f64 * c;
            match t.direction {
                Direction::Lower => lower_sum += v,
                _ => upper_sum += v,
            }
        }
        Combination::new(lower_sum, upper_sum)
    }

    pub fn paper_values(&self) -> Vec<f64> {
        self.terms.iter().map(BoundTerm::paper_value).collect()
    }
}

/// `4·π(x) ≥ lower_sum − upper_sum` in units of `C₃ x log log x/(log x)³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub lower_sum: f64,
    pub upper_sum: f64,
    pub margin: f64,
    pub theorem_constant: f64,
    /// Set when the margin is not positive.
    pub flagged: bool,
}

impl Combination {
    pub fn new(lower_sum: f64, upper_sum: f64) -> Self {
        let margin = lower_sum - upper_sum;
        Self {
            lower_sum,
            upper_sum,
            margin,
            theorem_constant: margin / 4.0,
            flagged: !(margin > 0.0),
        }
    }
}

pub const PUBLISHED_LOWER_SUM: &str = "3194.23324";
pub const PUBLISHED_UPPER_SUM: &str = "3181.18071";
pub const PUBLISHED_MARGIN: &str = "13.05253";
pub const PUBLISHED_THEOREM_CONSTANT: &str = "3.26313";
pub const PUBLISHED_UPPER_BOUND: &str = "100";
pub const PUBLISHED_C3: &str = "2.86259";
pub const PUBLISHED_C0: &str = "0.00408";
pub const PUBLISHED_E: &str = "0.00934";
pub const PUBLISHED_L: &str = "0.04839";

/// The margin implied by the published totals.
pub fn published_margin() -> f64 {
    Combination::new(
        PUBLISHED_LOWER_SUM.parse().unwrap(),
        PUBLISHED_UPPER_SUM.parse().unwrap(),
    )
    .margin
}

/// Recomputed coefficient for a label `S11 … S74`.
pub fn term_coefficient(label: &str) -> Result<f64> {
    Ok(TermManifest::builtin().get(label)?.evaluate()?.coefficient)
}

/// Recomputes every term and combines them.
pub fn combine_lemma31() -> Result<Combination> {
    let manifest = TermManifest::builtin();
    let values: Vec<f64> = manifest
        .evaluate_all()?
        .into_iter()
        .map(|e| e.coefficient)
        .collect();
    Ok(manifest.combine(&values))
}

/// The upper-bound term for `{x^{1/10}, x^{1/10}}`, `s₁ = s₂ = 2`.
pub fn upper_bound_term() -> BoundTerm {
    BoundTerm {
        label: "upper_bound".into(),
        direction: Direction::Upper,
        weight: 1,
        delta1: "0.2".into(),
        delta2: "0.2".into(),
        extra: ExtraFactor::One,
        brace: Brace::Upper { s1: 2.0, s2: 2.0 },
        paper: PUBLISHED_UPPER_BOUND.into(),
    }
}

/// The constant in `π_{1,1,1}(x) ≤ K·C₃ x/(log x)³`; exactly 100.
pub fn upper_bound_constant() -> f64 {
    upper_bound_term()
        .evaluate()
        .expect("fixed term evaluates")
        .coefficient
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportMode {
    /// Recompute every quantity from scratch.
    Recompute,
    /// Substitute the published values, bypassing recomputation.
    PaperValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub mode: ReportMode,
    /// Default relative tolerance.
    pub tolerance: f64,
    /// Per-label relative tolerances.
    pub overrides: BTreeMap<String, f64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            mode: ReportMode::Recompute,
            tolerance: 0.01,
            overrides: BTreeMap::new(),
        }
    }
}

/// Every label that appears in the verification report, in report order.
pub fn report_labels() -> Vec<String> {
    let mut labels: Vec<String> = TermManifest::builtin()
        .terms
        .iter()
        .map(|t| t.label.clone())
        .collect();
    labels.extend(
        [
            "C3",
            "C0",
            "E",
            "L",
            "lower_sum",
            "upper_sum",
            "margin",
            "theorem_constant",
            "upper_bound",
        ]
        .map(String::from),
    );
    labels
}

/// Rejects overrides naming labels that are not in the report.
pub fn validate_overrides(overrides: &BTreeMap<String, f64>) -> Result<()> {
    let known = report_labels();
    for label in overrides.keys() {
        if !known.iter().any(|k| k == label) {
            return Err(Error::UnknownLabel(label.clone()));
        }
    }
    Ok(())
}

/// One check per published constant.
pub fn verification_report(opts: &ReportOptions) -> Result<Vec<ConstantCheck>> {
    validate_overrides(&opts.overrides)?;
    let manifest = TermManifest::builtin();
    let tol = |label: &str| opts.overrides.get(label).copied().unwrap_or(opts.tolerance);
    let paper = |s: &str| -> f64 { s.parse().unwrap() };

    let (terms, c3v, c0, e, l, combination, upper) = match opts.mode {
        ReportMode::Recompute => {
            let terms: Vec<f64> = manifest
                .evaluate_all()?
                .into_iter()
                .map(|e| e.coefficient)
                .collect();
            let combination = manifest.combine(&terms);
            (
                terms,
                c3(),
                constant_c0()?,
                coefficient_e()?,
                coefficient_l()?,
                combination,
                upper_bound_constant(),
            )
        }
        ReportMode::PaperValues => (
            manifest.paper_values(),
            paper(PUBLISHED_C3),
            paper(PUBLISHED_C0),
            paper(PUBLISHED_E),
            paper(PUBLISHED_L),
            Combination::new(paper(PUBLISHED_LOWER_SUM), paper(PUBLISHED_UPPER_SUM)),
            paper(PUBLISHED_UPPER_BOUND),
        ),
    };

    let mut rows: Vec<ConstantCheck> = manifest
        .terms
        .iter()
        .zip(&terms)
        .map(|(t, &v)| {
            ConstantCheck::new(
                &t.label,
                v,
                &t.paper,
                t.direction,
                tol(&t.label),
                format!("weight {}", t.weight),
            )
        })
        .collect();

    let mut push = |label: &str, computed: f64, text: &str, dir: Direction, note: &str| {
        rows.push(ConstantCheck::new(label, computed, text, dir, tol(label), note));
    };
    push("C3", c3v, PUBLISHED_C3, Direction::Value, "Euler product");
    push("C0", c0, PUBLISHED_C0, Direction::Upper, "sum of c_k, 15 <= k <= 199");
    push("E", e, PUBLISHED_E, Direction::Upper, "|E| coefficient, w <= 0.5617");
    push("L", l, PUBLISHED_L, Direction::Upper, "w <= 0.5644");
    push(
        "lower_sum",
        combination.lower_sum,
        PUBLISHED_LOWER_SUM,
        Direction::Lower,
        "3 S11 + S12 + S21 + S22",
    );
    push(
        "upper_sum",
        combination.upper_sum,
        PUBLISHED_UPPER_SUM,
        Direction::Upper,
        "S3 + S4 + S5 + 2 S6 + S7",
    );
    push(
        "margin",
        combination.margin,
        PUBLISHED_MARGIN,
        Direction::Lower,
        "lower_sum - upper_sum",
    );
    push(
        "theorem_constant",
        combination.theorem_constant,
        PUBLISHED_THEOREM_CONSTANT,
        Direction::Lower,
        "margin / 4",
    );
    push(
        "upper_bound",
        upper,
        PUBLISHED_UPPER_BOUND,
        Direction::Value,
        "4/(0.2*0.2) F0(2)^2",
    );
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_manifest_has_sixteen_terms() {
        let m = TermManifest::builtin();
        assert_eq!(m.terms.len(), 16);
        assert_eq!(m.get("S11").unwrap().weight, 3);
        assert_eq!(m.get("S61").unwrap().weight, 2);
        assert_eq!(m.get("S12").unwrap().weight, 1);
        assert!(matches!(m.get("S99"), Err(Error::UnknownLabel(_))));
        assert!(term_coefficient("S0").is_err());
    }

    #[test]
    fn scalarization_is_exact() {
        assert_eq!(scalarization(&"0.2".into(), &"0.2".into()).unwrap(), 100.0);
        assert_eq!(scalarization(&"0.1".into(), &"0.1".into()).unwrap(), 400.0);
        let p = scalarization(&"0.475".into(), &"0.025".into()).unwrap();
        assert!((p - 336.842_105_263_157_9).abs() < 1e-12);
        assert!(scalarization(&"0".into(), &"0.2".into()).is_err());
        assert!(scalarization(&"-0.2".into(), &"0.2".into()).is_err());
        assert!(scalarization(&"abc".into(), &"0.2".into()).is_err());
    }

    #[test]
    fn upper_bound_is_exactly_one_hundred() {
        assert_eq!(upper_bound_constant(), 100.0);
    }

    #[test]
    fn published_identities() {
        let m = TermManifest::builtin();
        let c = m.combine(&m.paper_values());
        assert!((c.lower_sum - 3194.23324).abs() < 1e-9);
        assert!((c.upper_sum - 3181.18071).abs() < 0.01);
        assert!((c.margin - 13.05253).abs() < 0.001);
        assert!((published_margin() - 13.05253).abs() < 1e-9);
        assert!(!c.flagged);
    }

    #[test]
    fn nonpositive_margin_is_flagged() {
        assert!(Combination::new(1.0, 2.0).flagged);
        assert!(Combination::new(1.0, 1.0).flagged);
    }

    #[test]
    fn manifest_rejects_mismatched_direction() {
        let text = r#"
[[term]]
label = "X"
direction = "upper"
delta1 = "0.475"
delta2 = "0.025"
extra = { kind = "one" }
brace = { kind = "lower", s1 = 6.175, s2 = 5.0 }
paper = "1"
"#;
        assert!(matches!(TermManifest::from_toml_str(text), Err(Error::Manifest(_))));
    }

    #[test]
    fn manifest_rejects_duplicates() {
        let one = r#"
[[term]]
label = "X"
direction = "upper"
delta1 = "0.2"
delta2 = "0.2"
extra = { kind = "one" }
brace = { kind = "upper", s1 = 2.0, s2 = 2.0 }
paper = "100"
"#;
        assert!(TermManifest::from_toml_str(one).is_ok());
        let two = format!("{one}{one}");
        assert!(matches!(TermManifest::from_toml_str(&two), Err(Error::Manifest(_))));
    }

    #[test]
    fn paper_mode_passes_trivially() {
        let rows = verification_report(&ReportOptions {
            mode: ReportMode::PaperValues,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(rows.len(), 25);
        assert!(rows.iter().all(|r| r.passed()), "{rows:#?}");
        let margin = rows.iter().find(|r| r.label == "margin").unwrap();
        assert!((margin.computed - 13.05253).abs() < 1e-9);
    }

    #[test]
    fn unknown_override_rejected() {
        let mut opts = ReportOptions::default();
        opts.overrides.insert("S99".into(), 1.0);
        assert!(matches!(verification_report(&opts), Err(Error::UnknownLabel(_))));
    }
}
