//! Check reports shared by the validators.

use serde::Serialize;

/// One named check with an optional numeric residual and the tolerance it
/// was held to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl Check {
    pub fn exact(name: impl Into<String>, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            residual: None,
            tolerance: None,
        }
    }

    /// A numeric check: passes iff `residual <= tolerance` (NaN fails).
    pub fn numeric(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            passed: residual <= tolerance,
            residual: Some(residual),
            tolerance: Some(tolerance),
        }
    }
}

/// Outcome of a validator: the checks that ran plus every violation found.
#[derive(Debug, Clone)]
pub struct Report<E> {
    pub checks: Vec<Check>,
    pub violations: Vec<E>,
}

impl<E> Default for Report<E> {
    fn default() -> Self {
        Report {
            checks: Vec::new(),
            violations: Vec::new(),
        }
    }
}

impl<E> Report<E> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn push_check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn push_violation(&mut self, e: E) {
        self.violations.push(e);
    }

    /// Largest residual over all numeric checks.
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn merge(&mut self, other: Report<E>) {
        self.checks.extend(other.checks);
        self.violations.extend(other.violations);
    }

    /// First violation as an error, if any.
    pub fn into_result(self) -> Result<(), E> {
        match self.violations.into_iter().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    pub fn map_violations<F, E2>(self, f: F) -> Report<E2>
    where
        F: FnMut(E) -> E2,
    {
        Report {
            checks: self.checks,
            violations: self.violations.into_iter().map(f).collect(),
        }
    }
}
