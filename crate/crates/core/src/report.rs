//! Verification outcomes shared by every check in the crate.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use crate::algebra::RationalExpression;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Random { seed: u64, samples: usize },
    Numeric,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// A nonzero symbolic residual.
    Residual {
        component: String,
        residual: RationalExpression,
    },
    /// A sample point where two sides disagree.
    Point {
        values: BTreeMap<String, String>,
        detail: String,
    },
    /// A numeric discrepancy at a trajectory sample.
    Numeric { index: usize, value: f64, detail: String },
    Message(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub status: Status,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    /// Free-form facts worth keeping in the report (degrees, dimensions…).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
    #[serde(rename = "elapsed_ms", serialize_with = "as_millis")]
    pub elapsed: Duration,
}

fn as_millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}

impl VerificationReport {
    pub fn pass(check: impl Into<String>, mode: Mode) -> Self {
        VerificationReport {
            check: check.into(),
            family: None,
            status: Status::Pass,
            mode,
            witness: None,
            notes: BTreeMap::new(),
            elapsed: Duration::ZERO,
        }
    }

    /// A failing report always carries a witness.
    pub fn fail(check: impl Into<String>, mode: Mode, witness: Witness) -> Self {
        VerificationReport {
            status: Status::Fail,
            witness: Some(witness),
            ..Self::pass(check, mode)
        }
    }

    pub fn inconclusive(check: impl Into<String>, mode: Mode, why: impl Into<String>) -> Self {
        VerificationReport {
            status: Status::Inconclusive,
            witness: Some(Witness::Message(why.into())),
            ..Self::pass(check, mode)
        }
    }

    pub fn from_outcome(check: impl Into<String>, mode: Mode, outcome: Option<Witness>) -> Self {
        match outcome {
            None => Self::pass(check, mode),
            Some(w) => Self::fail(check, mode, w),
        }
    }

    pub fn with_family(mut self, family: impl Into<String>) -> Self {
        self.family = Some(family.into());
        self
    }

    pub fn with_note(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.notes.insert(key.into(), value.to_string());
        self
    }

    pub fn timed(mut self, start: Instant) -> Self {
        self.elapsed = start.elapsed();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        let mode = match self.mode {
            Mode::Exact => "exact".to_string(),
            Mode::Random { seed, samples } => format!("random seed={seed} n={samples}"),
            Mode::Numeric => "numeric".to_string(),
        };
        let mut line = format!(
            "{status:<5} {} [{mode}] {:.1} ms",
            self.check,
            self.elapsed.as_secs_f64() * 1e3
        );
        if let Some(w) = &self.witness {
            let text = match w {
                Witness::Residual { component, residual } => {
                    let mut r = residual.to_string();
                    if r.len() > 160 {
                        r.truncate(160);
                        r.push('…');
                    }
                    format!("{component}: residual {r}")
                }
                Witness::Point { detail, .. } => detail.clone(),
                Witness::Numeric { index, value, detail } => format!("{detail} (sample {index}: {value:.3e})"),
                Witness::Message(m) => m.clone(),
            };
            line.push_str(": ");
            line.push_str(&text);
        }
        line
    }
}

/// How a symbolic identity is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exact,
    Random { seed: u64, samples: usize },
}

impl From<CheckMode> for Mode {
    fn from(m: CheckMode) -> Mode {
        match m {
            CheckMode::Exact => Mode::Exact,
            CheckMode::Random { seed, samples } => Mode::Random { seed, samples },
        }
    }
}
