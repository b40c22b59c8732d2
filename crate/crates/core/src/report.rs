//! Shared report records emitted by the verification suites. Serialized
//! as JSON lists of `{id, n (or pair), max_deviation, pass}` entries.

use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct IdentityCheck {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<(u64, u64)>,
    pub max_deviation: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub skipped: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl IdentityCheck {
    pub fn new(id: &str, max_deviation: f64, tol: f64) -> Self {
        IdentityCheck {
            id: id.to_string(),
            n: None,
            pair: None,
            max_deviation,
            pass: max_deviation <= tol,
            skipped: false,
            note: None,
        }
    }

    pub fn at_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn at_pair(mut self, n: u64, m: u64) -> Self {
        self.pair = Some((n, m));
        self
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    pub fn skip(id: &str, note: &str) -> Self {
        IdentityCheck {
            id: id.to_string(),
            n: None,
            pair: None,
            max_deviation: 0.0,
            pass: true,
            skipped: true,
            note: Some(note.to_string()),
        }
    }

    /// A skipped check counts as a pass; its rationale is in `note`.
    pub fn is_violation(&self) -> bool {
        !self.pass && !self.skipped
    }
}
