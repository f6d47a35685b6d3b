//! Serializable residual reports.

use serde::Serialize;

use crate::scalar::Scalar;

/// Worst residual of one family of identities.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckEntry {
    pub name: String,
    pub evaluated: usize,
    pub violations: usize,
    pub max_residual: f64,
    /// Exact rendering of the worst residual (exact arithmetic only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual_exact: Option<String>,
    /// 1-based index tuple of the worst violation, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<Vec<usize>>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckReport {
    pub subject: String,
    pub arithmetic: String,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<CheckEntry>,
}

impl CheckReport {
    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Accumulates residuals for one [`CheckEntry`].
pub(crate) struct ResidualTracker<S> {
    name: String,
    tol: f64,
    evaluated: usize,
    violations: usize,
    worst: Option<(f64, S, Vec<usize>)>,
    worst_violation: Option<Vec<usize>>,
}

impl<S: Scalar> ResidualTracker<S> {
    pub(crate) fn new(name: &str, tol: f64) -> Self {
        Self { name: name.to_string(), tol, evaluated: 0, violations: 0, worst: None, worst_violation: None }
    }

    pub(crate) fn push(&mut self, residual: S, location: &[usize]) {
        self.evaluated += 1;
        let mag = residual.to_f64().abs();
        let violated = !residual.is_zero_within(self.tol);
        if violated {
            self.violations += 1;
        }
        let better = self.worst.as_ref().is_none_or(|(m, _, _)| mag > *m);
        if better {
            self.worst = Some((mag, residual, location.to_vec()));
            if violated {
                self.worst_violation = Some(location.iter().map(|i| i + 1).collect());
            }
        }
    }

    pub(crate) fn finish(self) -> CheckEntry {
        let (max_residual, exact) = match &self.worst {
            Some((m, r, _)) => (*m, S::EXACT.then(|| r.render())),
            None => (0.0, S::EXACT.then(|| S::zero().render())),
        };
        CheckEntry {
            name: self.name,
            evaluated: self.evaluated,
            violations: self.violations,
            max_residual,
            max_residual_exact: exact,
            location: self.worst_violation,
            passed: self.violations == 0,
        }
    }
}
