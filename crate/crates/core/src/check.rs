use std::fmt;

use serde::{Deserialize, Serialize};

/// How a computed quantity relates to its published counterpart.
///
/// `Lower`: the published value is a lower bound, so the computed value may
/// exceed it but must not fall below it by more than the tolerance.
/// `Upper` is the mirror image. `Value` is a two-sided approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Lower,
    Upper,
    Value,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Lower => "lower",
            Direction::Upper => "upper",
            Direction::Value => "value",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Flag,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Flag => "flag",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantCheck {
    pub label: String,
    pub computed: f64,
    /// Published value exactly as printed.
    pub paper: String,
    pub direction: Direction,
    /// Relative tolerance used for the verdict.
    pub tolerance: f64,
    pub rel_diff: f64,
    pub verdict: Verdict,
    pub note: String,
}

impl ConstantCheck {
    pub fn new(
        label: impl Into<String>,
        computed: f64,
        paper: impl Into<String>,
        direction: Direction,
        tolerance: f64,
        note: impl Into<String>,
    ) -> Self {
        let paper = paper.into();
        let reference = paper_value(&paper);
        let rel_diff = if reference == 0.0 {
            computed - reference
        } else {
            (computed - reference) / reference.abs()
        };
        let ok = computed.is_finite()
            && match direction {
                Direction::Lower => rel_diff >= -tolerance,
                Direction::Upper => rel_diff <= tolerance,
                Direction::Value => rel_diff.abs() <= tolerance,
            };
        Self {
            label: label.into(),
            computed,
            paper,
            direction,
            tolerance,
            rel_diff,
            verdict: if ok { Verdict::Pass } else { Verdict::Flag },
            note: note.into(),
        }
    }

    pub fn paper_value(&self) -> f64 {
        paper_value(&self.paper)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn paper_value(text: &str) -> f64 {
    text.parse().unwrap_or(f64::NAN)
}
