//! Python bindings: `import hltriple`.

use std::collections::BTreeMap;

use hltriple_core as core;
use hltriple_core::bounds::{ReportMode, ReportOptions, TermManifest};
use hltriple_core::engine::{CountKind, Query};
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: core::Error) -> PyErr {
    match e {
        core::Error::UnknownLabel(l) => PyKeyError::new_err(l),
        core::Error::Quadrature(q) => PyRuntimeError::new_err(q.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn kind(name: &str) -> PyResult<CountKind> {
    CountKind::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown kind `{name}`")))
}

/// One row of the verification report.
#[pyclass(frozen, get_all, skip_from_py_object, module = "hltriple")]
#[derive(Clone)]
struct ConstantCheck {
    label: String,
    computed: f64,
    paper: String,
    direction: String,
    tolerance: f64,
    rel_diff: f64,
    passed: bool,
    note: String,
}

#[pymethods]
impl ConstantCheck {
    fn __repr__(&self) -> String {
        format!(
            "ConstantCheck(label={:?}, computed={}, paper={:?}, direction={:?}, rel_diff={:.3e}, passed={})",
            self.label,
            self.computed,
            self.paper,
            self.direction,
            self.rel_diff,
            if self.passed { "True" } else { "False" }
        )
    }
}

impl From<core::ConstantCheck> for ConstantCheck {
    fn from(c: core::ConstantCheck) -> Self {
        Self {
            passed: c.passed(),
            label: c.label,
            computed: c.computed,
            paper: c.paper,
            direction: c.direction.to_string(),
            tolerance: c.tolerance,
            rel_diff: c.rel_diff,
            note: c.note,
        }
    }
}

/// Result of one counting query.
#[pyclass(frozen, get_all, skip_from_py_object, module = "hltriple")]
#[derive(Clone)]
struct TripleCountResult {
    kind: String,
    size: u64,
    params: Vec<u32>,
    count: u64,
    predicted: f64,
    ratio: f64,
    unit_exclusions: u64,
}

#[pymethods]
impl TripleCountResult {
    fn __repr__(&self) -> String {
        format!(
            "TripleCountResult(kind={:?}, size={}, params={:?}, count={}, ratio={:.6})",
            self.kind, self.size, self.params, self.count, self.ratio
        )
    }
}

impl From<core::TripleCountResult> for TripleCountResult {
    fn from(r: core::TripleCountResult) -> Self {
        let params = match r.query {
            Query::Pi1ab { a, b, .. } | Query::D1ab { a, b, .. } => vec![a, b],
            Query::Pi1r { r, .. } | Query::D1r { r, .. } => vec![r],
            Query::Dsr { s, r, .. } => vec![s, r],
        };
        Self {
            kind: r.query.kind().name().to_string(),
            size: r.query.size(),
            params,
            count: r.count,
            predicted: r.predicted,
            ratio: r.ratio,
            unit_exclusions: r.unit_exclusions,
        }
    }
}

/// Weighted sums of the sixteen coefficients.
#[pyclass(frozen, get_all, skip_from_py_object, module = "hltriple")]
#[derive(Clone)]
struct Combination {
    lower_sum: f64,
    upper_sum: f64,
    margin: f64,
    theorem_constant: f64,
    flagged: bool,
}

#[pymethods]
impl Combination {
    fn __repr__(&self) -> String {
        format!(
            "Combination(lower_sum={}, upper_sum={}, margin={}, theorem_constant={})",
            self.lower_sum, self.upper_sum, self.margin, self.theorem_constant
        )
    }
}

impl From<core::Combination> for Combination {
    fn from(c: core::Combination) -> Self {
        Self {
            lower_sum: c.lower_sum,
            upper_sum: c.upper_sum,
            margin: c.margin,
            theorem_constant: c.theorem_constant,
            flagged: c.flagged,
        }
    }
}

/// Upper linear-sieve function `F₀(s)`, `0 < s ≤ 7`.
#[pyfunction]
fn upper_f0(s: f64) -> PyResult<f64> {
    core::upper_f0(s).map_err(to_py)
}

/// Lower linear-sieve function `f₀(s)`, `0 < s ≤ 8`.
#[pyfunction]
fn lower_f0(s: f64) -> PyResult<f64> {
    core::lower_f0(s).map_err(to_py)
}

/// Buchstab function `w(u)`, `1 ≤ u ≤ 64`.
#[pyfunction]
fn buchstab_w(u: f64) -> PyResult<f64> {
    core::buchstab_w(u).map_err(to_py)
}

/// `(value, truncation_prime, tail_bound)` for the triple constant `C₃`.
#[pyfunction]
#[pyo3(signature = (tol = 1e-7))]
fn constant_c3(py: Python<'_>, tol: f64) -> PyResult<(f64, u64, f64)> {
    let r = py.detach(|| core::constant_c3(tol)).map_err(to_py)?;
    Ok((r.value, r.truncation_prime, r.tail_bound))
}

/// `(value, truncation_prime, tail_bound)` for the twin-prime constant `C₂`.
#[pyfunction]
#[pyo3(signature = (tol = 1e-7))]
fn constant_c2(py: Python<'_>, tol: f64) -> PyResult<(f64, u64, f64)> {
    let r = py.detach(|| core::constant_c2(tol)).map_err(to_py)?;
    Ok((r.value, r.truncation_prime, r.tail_bound))
}

/// Goldbach singular series `C(N)` for even `N`.
#[pyfunction]
fn singular_series_cn(n: u64) -> PyResult<f64> {
    core::singular_series_cn(n).map_err(to_py)
}

/// `C₀`, `|E|` and `L` by name.
#[pyfunction]
fn constants(py: Python<'_>) -> PyResult<BTreeMap<&'static str, f64>> {
    py.detach(|| {
        Ok(BTreeMap::from([
            ("C2", core::constants::c2()),
            ("C3", core::constants::c3()),
            ("C0", core::constant_c0()?),
            ("E", core::coefficient_e()?),
            ("L", core::coefficient_l()?),
        ]))
    })
    .map_err(to_py)
}

/// Recomputed main-term coefficient for a label `S11` … `S74`.
#[pyfunction]
fn term_coefficient(py: Python<'_>, label: &str) -> PyResult<f64> {
    py.detach(|| core::term_coefficient(label)).map_err(to_py)
}

/// Labels of the sixteen main terms in combination order.
#[pyfunction]
fn term_labels() -> Vec<String> {
    TermManifest::builtin().terms.iter().map(|t| t.label.clone()).collect()
}

/// Combines sixteen coefficients, or the recomputed ones when omitted.
#[pyfunction]
#[pyo3(signature = (coefficients = None))]
fn combine(py: Python<'_>, coefficients: Option<Vec<f64>>) -> PyResult<Combination> {
    let manifest = TermManifest::builtin();
    match coefficients {
        Some(c) if c.len() != manifest.terms.len() => Err(PyValueError::new_err(format!(
            "expected {} coefficients, got {}",
            manifest.terms.len(),
            c.len()
        ))),
        Some(c) => Ok(manifest.combine(&c).into()),
        None => py
            .detach(core::combine_lemma31)
            .map(Into::into)
            .map_err(to_py),
    }
}

/// The constant 100 in the upper bound for prime triples.
#[pyfunction]
fn upper_bound_constant() -> f64 {
    core::upper_bound_constant()
}

/// Full report; `overrides` maps labels to relative tolerances.
#[pyfunction]
#[pyo3(signature = (tolerance = 0.01, paper_values = false, overrides = None))]
fn verification_report(
    py: Python<'_>,
    tolerance: f64,
    paper_values: bool,
    overrides: Option<BTreeMap<String, f64>>,
) -> PyResult<Vec<ConstantCheck>> {
    let opts = ReportOptions {
        mode: if paper_values {
            ReportMode::PaperValues
        } else {
            ReportMode::Recompute
        },
        tolerance,
        overrides: overrides.unwrap_or_default(),
    };
    let rows = py.detach(|| core::verification_report(&opts)).map_err(to_py)?;
    Ok(rows.into_iter().map(Into::into).collect())
}

/// Runs one count; `q` is ignored by `pi_1r` and `D_1r`.
#[pyfunction]
#[pyo3(signature = (kind_name, size, p, q = 1))]
fn count(py: Python<'_>, kind_name: &str, size: u64, p: u32, q: u32) -> PyResult<TripleCountResult> {
    let query = Query::new(kind(kind_name)?, size, p, q);
    py.detach(|| core::count(query)).map(Into::into).map_err(to_py)
}

/// Counts at ascending checkpoints.
#[pyfunction]
fn ratio_scan(
    py: Python<'_>,
    kind_name: &str,
    a: u32,
    b: u32,
    checkpoints: Vec<u64>,
) -> PyResult<Vec<TripleCountResult>> {
    let k = kind(kind_name)?;
    let rows = py
        .detach(|| core::ratio_scan(k, a, b, &checkpoints))
        .map_err(to_py)?;
    Ok(rows.into_iter().map(Into::into).collect())
}

/// `Ω(n)` for `lo ≤ n ≤ hi`, one byte per `n`.
#[pyfunction]
fn sieve_omega(py: Python<'_>, lo: u64, hi: u64) -> PyResult<Vec<u8>> {
    py.detach(|| core::sieve_omega(lo, hi))
        .map(|s| s.omegas)
        .map_err(to_py)
}

#[pymodule]
fn hltriple(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ConstantCheck>()?;
    m.add_class::<TripleCountResult>()?;
    m.add_class::<Combination>()?;
    m.add_function(wrap_pyfunction!(upper_f0, m)?)?;
    m.add_function(wrap_pyfunction!(lower_f0, m)?)?;
    m.add_function(wrap_pyfunction!(buchstab_w, m)?)?;
    m.add_function(wrap_pyfunction!(constant_c3, m)?)?;
    m.add_function(wrap_pyfunction!(constant_c2, m)?)?;
    m.add_function(wrap_pyfunction!(singular_series_cn, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    m.add_function(wrap_pyfunction!(term_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(term_labels, m)?)?;
    m.add_function(wrap_pyfunction!(combine, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound_constant, m)?)?;
    m.add_function(wrap_pyfunction!(verification_report, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(ratio_scan, m)?)?;
    m.add_function(wrap_pyfunction!(sieve_omega, m)?)?;
    Ok(())
}
