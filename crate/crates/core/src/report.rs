//! Uniform result record for every property check.

use serde::{Deserialize, Serialize};

use crate::sampling::Seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: u64,
    pub residual: f64,
    pub message: String,
}

/// Outcome of one check run. Contains no clock or host data, so equal
/// inputs give byte-identical JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub seed: Seed,
    pub trials: u64,
    pub max_residual: f64,
    pub violations: Vec<Violation>,
    /// Plain statement of the property being checked.
    #[serde(rename = "paper_ref")]
    pub property: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl Report {
    pub fn new(check: impl Into<String>, seed: Seed, property: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            seed,
            trials: 0,
            max_residual: 0.0,
            violations: Vec::new(),
            property: property.into(),
            pass: true,
            details: None,
        }
    }

    /// Records one trial; a residual above `threshold` (or NaN) is a violation.
    pub fn record(&mut self, trial: u64, residual: f64, threshold: f64, what: impl FnOnce() -> String) {
        self.trials += 1;
        self.observe(trial, residual, threshold, what);
    }

    /// Like [`Report::record`] but without counting a new trial.
    pub fn observe(&mut self, trial: u64, residual: f64, threshold: f64, what: impl FnOnce() -> String) {
        if residual > self.max_residual || residual.is_nan() {
            self.max_residual = residual;
        }
        if !(residual <= threshold) {
            self.fail(trial, residual, what());
        }
    }

    pub fn fail(&mut self, trial: u64, residual: f64, message: impl Into<String>) {
        self.pass = false;
        self.violations.push(Violation {
            trial,
            residual,
            message: message.into(),
        });
    }

    pub fn with_details(mut self, details: serde_json::Value) -> Self {
        self.details = Some(details);
        self
    }

    /// Combines two runs of the same check. Associative; the left operand's
    /// name, seed, property text and details are kept.
    pub fn merge(mut self, other: Report) -> Report {
        self.trials += other.trials;
        if other.max_residual > self.max_residual || other.max_residual.is_nan() {
            self.max_residual = other.max_residual;
        }
        self.violations.extend(other.violations);
        self.pass &= other.pass;
        if self.details.is_none() {
            self.details = other.details;
        }
        self
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}: {} ({} trials, seed {}, max residual {:.3e})\n  {}\n",
            self.check,
            if self.pass { "PASS" } else { "FAIL" },
            self.trials,
            self.seed.0,
            self.max_residual,
            self.property
        );
        for v in self.violations.iter().take(10) {
            out.push_str(&format!("  trial {}: {:.3e} {}\n", v.trial, v.residual, v.message));
        }
        if self.violations.len() > 10 {
            out.push_str(&format!("  ... {} more\n", self.violations.len() - 10));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_and_merge() {
        let mut a = Report::new("x", Seed(1), "p");
        a.record(0, 1e-9, 1e-8, || "a".into());
        assert!(a.pass && a.violations.is_empty());
        let mut b = Report::new("x", Seed(1), "p");
        b.record(1, 1e-6, 1e-8, || "too big".into());
        let mut c = Report::new("x", Seed(1), "p");
        c.record(2, f64::NAN, 1e-8, || "nan".into());

        let left = a.clone().merge(b.clone()).merge(c.clone());
        let right = a.merge(b.merge(c));
        assert_eq!(left.trials, 3);
        assert!(!left.pass);
        assert_eq!(left.violations.len(), 2);
        assert_eq!(
            serde_json::to_string(&left.violations).unwrap(),
            serde_json::to_string(&right.violations).unwrap()
        );
        assert!(left.max_residual.is_nan() && right.max_residual.is_nan());
    }

    #[test]
    fn json_shape() {
        let r = Report::new("svd-law", Seed(7), "sines");
        let v = serde_json::to_value(&r).unwrap();
        for key in ["check", "seed", "trials", "max_residual", "violations", "paper_ref", "pass"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["seed"], 7);
        assert!(v.get("details").is_none());
    }
}
