//! Numerical toolkit for Hardy–Littlewood triples `(p, p+2, p+6)` with
//! almost-prime entries.
//!
//! - [`special`]: the linear-sieve functions `F₀`, `f₀` and the Buchstab
//!   function `w`.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration, nested iterated
//!   integrals and the chain recursion behind `c_k`.
//! - [`constants`]: Euler products `C₂`, `C₃`, `C(N)` and the auxiliary
//!   constants `C₀`, `|E|`, `L`.
//! - [`bounds`]: the sixteen main-term coefficients of the weighted sieve,
//!   their combination and the verification report.
//! - [`engine`]: segmented Ω-sieve and the almost-prime counting functions.

pub mod bounds;
pub mod check;
pub mod constants;
pub mod engine;
pub mod error;
pub mod integrals;
pub mod primes;
pub mod quadrature;
pub mod special;

pub use bounds::{
    combine_lemma31, term_coefficient, upper_bound_constant, verification_report, BoundTerm,
    Combination, ReportMode, ReportOptions, TermManifest,
};
pub use check::{ConstantCheck, Direction, Verdict};
pub use constants::{
    coefficient_e, coefficient_l, constant_c0, constant_c2, constant_c3, singular_series_cn,
    EulerProductResult,
};
pub use engine::{
    count, count_chen_variants, count_d_1ab, count_pi_1ab, ratio_scan, sieve_omega, CountKind,
    OmegaSegment, Query, TripleCountResult,
};
pub use error::{Error, Result};
pub use quadrature::{integrate_1d, integrate_nested, ChainFamily, IntegralSpec};
pub use special::{buchstab_w, lower_f0, upper_f0, verify_buchstab_bounds, SieveCurveTable};
