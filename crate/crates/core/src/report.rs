//! Check verdicts and reports.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// A concrete counterexample to a checked identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Name of the violated condition.
    pub condition: String,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violated on {}: lhs = {}, rhs = {}",
            self.condition, self.input, self.lhs, self.rhs
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail { witness: Witness },
    /// A prerequisite hypothesis failed, so the check was not evaluated.
    Inadmissible { reason: String },
    /// Computed, but a hypothesis it relies on is violated.
    NotGuaranteed { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fail { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail { .. } => "fail",
            Verdict::Inadmissible { .. } => "inadmissible",
            Verdict::NotGuaranteed { .. } => "not-guaranteed",
        }
    }
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub verdict: Verdict,
    /// Number of basis cases evaluated.
    pub cases: u64,
    /// Sub-identities covered by this check.
    pub conditions: Vec<String>,
    /// Sub-identities that failed on at least one case.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violated: Vec<String>,
    /// Rendered symbolic results attached to the check.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub payload: BTreeMap<String, String>,
    /// Wall-clock time; shown in text output, never serialized.
    #[serde(skip)]
    pub elapsed: Option<Duration>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }

    pub fn inadmissible(id: &str, reason: impl Into<String>) -> Self {
        CheckResult {
            id: id.to_string(),
            verdict: Verdict::Inadmissible {
                reason: reason.into(),
            },
            cases: 0,
            conditions: Vec::new(),
            violated: Vec::new(),
            payload: BTreeMap::new(),
            elapsed: None,
        }
    }

    pub fn violates(&self, condition: &str) -> bool {
        self.violated.iter().any(|c| c == condition)
    }

    pub fn with_payload(mut self, key: &str, value: impl Into<String>) -> Self {
        self.payload.insert(key.to_string(), value.into());
        self
    }

    /// Combines several results into one: the first non-passing verdict wins.
    pub fn combine(id: &str, parts: Vec<CheckResult>) -> CheckResult {
        let mut out = CheckResult {
            id: id.to_string(),
            verdict: Verdict::Pass,
            cases: 0,
            conditions: Vec::new(),
            violated: Vec::new(),
            payload: BTreeMap::new(),
            elapsed: None,
        };
        for part in parts {
            out.cases += part.cases;
            out.conditions.extend(part.conditions);
            out.violated.extend(part.violated);
            for (k, v) in part.payload {
                out.payload.insert(k, v);
            }
            if out.verdict.is_pass() && !part.verdict.is_pass() {
                out.verdict = part.verdict;
            }
        }
        out
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} ({} cases)", self.verdict.label(), self.id, self.cases)?;
        if let Some(t) = self.elapsed {
            write!(f, " in {t:.2?}")?;
        }
        match &self.verdict {
            Verdict::Pass => Ok(()),
            Verdict::Fail { witness } => write!(f, "\n    witness: {witness}"),
            Verdict::Inadmissible { reason } | Verdict::NotGuaranteed { reason } => {
                write!(f, "\n    reason: {reason}")
            }
        }
    }
}

/// Accumulates exhaustive comparisons, keeping the first counterexample.
#[derive(Debug)]
pub struct Tally {
    id: String,
    conditions: Vec<String>,
    cases: u64,
    failure: Option<Witness>,
    violated: Vec<String>,
}

impl Tally {
    pub fn new(id: &str, conditions: &[&str]) -> Self {
        Tally {
            id: id.to_string(),
            conditions: conditions.iter().map(|s| s.to_string()).collect(),
            cases: 0,
            failure: None,
            violated: Vec::new(),
        }
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    /// Records one case; returns whether it held.
    pub fn compare<T: PartialEq + fmt::Display>(
        &mut self,
        condition: &str,
        input: impl FnOnce() -> String,
        lhs: &T,
        rhs: &T,
    ) -> bool {
        self.cases += 1;
        if lhs == rhs {
            return true;
        }
        self.mark(condition);
        if self.failure.is_none() {
            self.failure = Some(Witness {
                condition: condition.to_string(),
                input: input(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
        false
    }

    fn mark(&mut self, condition: &str) {
        if !self.violated.iter().any(|c| c == condition) {
            self.violated.push(condition.to_string());
        }
    }

    pub fn fail(&mut self, witness: Witness) {
        self.cases += 1;
        self.mark(&witness.condition);
        if self.failure.is_none() {
            self.failure = Some(witness);
        }
    }

    pub fn finish(self) -> CheckResult {
        CheckResult {
            id: self.id,
            verdict: match self.failure {
                None => Verdict::Pass,
                Some(witness) => Verdict::Fail { witness },
            },
            cases: self.cases,
            conditions: self.conditions,
            violated: self.violated,
            payload: BTreeMap::new(),
            elapsed: None,
        }
    }
}

/// The full output of a scenario run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: BTreeMap<String, String>,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub symbolic: BTreeMap<String, String>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn any_fail(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_fail())
    }

    pub fn check(&self, id: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("scenario:\n");
        for (k, v) in &self.scenario {
            out.push_str(&format!("  {k} = {v}\n"));
        }
        out.push_str("checks:\n");
        for c in &self.checks {
            out.push_str(&format!("  {c}\n"));
            for (k, v) in &c.payload {
                out.push_str(&format!("    {k}: {v}\n"));
            }
        }
        if !self.symbolic.is_empty() {
            out.push_str("symbolic:\n");
            for (k, v) in &self.symbolic {
                out.push_str(&format!("  {k}:\n    {v}\n"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_keeps_first_witness() {
        let mut t = Tally::new("demo", &["a", "b"]);
        assert!(t.compare("a", || "one".into(), &1, &1));
        assert!(!t.compare("b", || "two".into(), &1, &2));
        assert!(!t.compare("a", || "three".into(), &3, &4));
        let r = t.finish();
        assert_eq!(r.cases, 3);
        assert_eq!(r.violated, vec!["b", "a"]);
        assert_eq!(r.verdict.witness().unwrap().input, "two");
    }

    #[test]
    fn json_skips_timing_and_empty_fields() {
        let mut r = Tally::new("demo", &["a"]).finish();
        r.elapsed = Some(Duration::from_millis(5));
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"id":"demo","verdict":{"status":"pass"},"cases":0,"conditions":["a"]}"#);
        assert!(r.to_string().ends_with(" in 5.00ms"));
        let back: CheckResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back.elapsed, None);
    }

    #[test]
    fn combine_takes_first_non_pass() {
        let pass = Tally::new("p", &["p"]).finish();
        let inad = CheckResult::inadmissible("i", "missing hypothesis");
        let c = CheckResult::combine("both", vec![pass, inad]);
        assert_eq!(c.verdict.label(), "inadmissible");
        assert_eq!(c.conditions, vec!["p"]);
    }
}
