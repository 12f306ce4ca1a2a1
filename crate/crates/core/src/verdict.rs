use std::fmt;

use serde::Serialize;

/// Finite-prefix evidence status for a condition that is asymptotic in nature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Skipped => "SKIPPED",
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// Outcome of one sequence-level check.
///
/// `margin` is the worst log-scale violation seen (positive means the defining
/// inequality was broken by that much). A `Fail` always carries a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<(usize, usize)>,
    pub margin: f64,
    pub constant: Option<f64>,
    pub note: Option<String>,
}

impl Verdict {
    pub fn pass(margin: f64) -> Self {
        Verdict { status: Status::Pass, witness: None, margin, constant: None, note: None }
    }

    pub fn fail(witness: (usize, usize), margin: f64) -> Self {
        Verdict { status: Status::Fail, witness: Some(witness), margin, constant: None, note: None }
    }

    pub fn inconclusive(margin: f64, note: impl Into<String>) -> Self {
        Verdict { status: Status::Inconclusive, witness: None, margin, constant: None, note: Some(note.into()) }
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_witness(mut self, w: (usize, usize)) -> Self {
        self.witness = Some(w);
        self
    }
}
