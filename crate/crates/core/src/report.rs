//! Pass/fail reports with residuals.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub tag: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub tol: f64,
    pub checks: Vec<Check>,
    pub summary: Summary,
    /// Integer results such as `dim_Ahat`, emitted as top-level keys.
    #[serde(flatten)]
    pub values: BTreeMap<String, i64>,
}

impl Report {
    pub fn new(suite: impl Into<String>, tol: f64) -> Report {
        Report { suite: suite.into(), tol, checks: Vec::new(), summary: Summary { passed: 0, failed: 0 }, values: BTreeMap::new() }
    }

    fn push(&mut self, check: Check) {
        if check.pass {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
        }
        self.checks.push(check);
    }

    /// A residual compared against the report tolerance.
    pub fn residual(&mut self, name: impl Into<String>, residual: f64, tag: &str) {
        let residual = if residual.is_finite() { residual.abs() } else { f64::MAX };
        let pass = residual <= self.tol;
        self.push(Check { name: name.into(), pass, residual, tag: tag.into(), detail: None });
    }

    /// A boolean outcome.
    pub fn flag(&mut self, name: impl Into<String>, pass: bool, tag: &str) {
        self.push(Check { name: name.into(), pass, residual: if pass { 0.0 } else { 1.0 }, tag: tag.into(), detail: None });
    }

    /// A boolean outcome with an explanation.
    pub fn flag_detail(&mut self, name: impl Into<String>, pass: bool, tag: &str, detail: impl Into<String>) {
        self.push(Check {
            name: name.into(),
            pass,
            residual: if pass { 0.0 } else { 1.0 },
            tag: tag.into(),
            detail: Some(detail.into()),
        });
    }

    /// Integer equality, e.g. a dimension against its expected value.
    pub fn count(&mut self, name: impl Into<String>, got: usize, want: usize, tag: &str) {
        let pass = got == want;
        self.push(Check {
            name: name.into(),
            pass,
            residual: (got as f64 - want as f64).abs(),
            tag: tag.into(),
            detail: Some(format!("got {got}, expected {want}")),
        });
    }

    /// A computation that may fail; failures are recorded, not propagated.
    pub fn attempt(&mut self, name: impl Into<String>, r: Result<f64>, tag: &str) {
        match r {
            Ok(v) => self.residual(name, v, tag),
            Err(e) => self.push(Check { name: name.into(), pass: false, residual: f64::MAX, tag: tag.into(), detail: Some(e.to_string()) }),
        }
    }

    pub fn value(&mut self, key: impl Into<String>, v: i64) {
        self.values.insert(key.into(), v);
    }

    /// Appends another report's checks under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            c.name = format!("{prefix}{}", c.name);
            self.push(c);
        }
        for (k, v) in other.values {
            self.values.insert(format!("{prefix}{k}"), v);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "suite {} (tol {:e})", self.suite, self.tol);
        for (k, v) in &self.values {
            let _ = writeln!(s, "  {k} = {v}");
        }
        for c in &self.checks {
            let _ = write!(s, "  {} {} residual={:.3e} [{}]", if c.pass { "PASS" } else { "FAIL" }, c.name, c.residual, c.tag);
            if let Some(d) = &c.detail {
                let _ = write!(s, " ({d})");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "  {} passed, {} failed", self.summary.passed, self.summary.failed);
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Report> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn json_round_trip() {
        let mut r = Report::new("legs", 1e-8);
        r.residual("a", 1e-12, "legs");
        r.flag("b", false, "legs");
        r.attempt("c", Err(Error::NotGroupoidPmu), "x");
        r.value("dim_Ahat", 2);
        let j = r.to_json();
        assert!(j.contains("\"dim_Ahat\": 2"));
        assert_eq!(Report::from_json(&j).unwrap(), r);
        assert!(!r.all_pass());
        assert_eq!(r.summary.failed, 2);
    }
}
