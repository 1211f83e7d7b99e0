//! Verdicts produced by the verification routines.

use serde::{Deserialize, Serialize};

/// One audited hypothesis of a check: what was required and what was measured
/// on the actual grid data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub satisfied: bool,
    pub measured: f64,
}

impl Hypothesis {
    pub fn new(name: impl Into<String>, satisfied: bool, measured: f64) -> Self {
        Self {
            name: name.into(),
            satisfied,
            measured,
        }
    }
}

/// Outcome of one lemma/theorem/property verification.
///
/// A report is `applicable` only when every hypothesis holds, and it can only
/// pass when applicable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    #[serde(rename = "theorem_id")]
    pub id: String,
    pub hypotheses: Vec<Hypothesis>,
    pub bound: f64,
    pub measured: f64,
    pub slack: f64,
    pub passed: bool,
    pub applicable: bool,
}

impl CheckReport {
    /// Builds a report; `conclusion_holds` is ignored when a hypothesis fails.
    pub fn new(
        id: impl Into<String>,
        hypotheses: Vec<Hypothesis>,
        bound: f64,
        measured: f64,
        slack: f64,
        conclusion_holds: bool,
    ) -> Self {
        let applicable = hypotheses.iter().all(|h| h.satisfied);
        Self {
            id: id.into(),
            hypotheses,
            bound,
            measured,
            slack,
            passed: applicable && conclusion_holds,
            applicable,
        }
    }

    /// Failed despite every hypothesis holding.
    pub fn is_failure(&self) -> bool {
        self.applicable && !self.passed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cannot_pass_on_failed_hypothesis() {
        let r = CheckReport::new(
            "T3.1",
            vec![Hypothesis::new("F >= 0", false, -1.0)],
            0.0,
            1.0,
            1.0,
            true,
        );
        assert!(!r.passed);
        assert!(!r.applicable);
        assert!(!r.is_failure());
    }

    #[test]
    fn json_uses_theorem_id_key() {
        let r = CheckReport::new("C1", vec![], 0.0, 0.0, 0.0, true);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"theorem_id\":\"C1\""));
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
