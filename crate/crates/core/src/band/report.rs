use alloc::vec::Vec;

use crate::linalg::Tolerance;

/// One residual check at a given position.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub condition: &'static str,
    pub row: i64,
    pub column: Option<i64>,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// A check that needed data outside the valid window.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedCheck {
    pub condition: &'static str,
    pub row: i64,
}

/// Outcome of a family of checks over a finite window of indices.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub lo: i64,
    pub hi: i64,
    pub checks: Vec<ConditionCheck>,
    pub skipped: Vec<SkippedCheck>,
    pub passed: bool,
}

impl WindowReport {
    pub fn new(lo: i64, hi: i64) -> Self {
        Self {
            lo,
            hi,
            checks: Vec::new(),
            skipped: Vec::new(),
            passed: true,
        }
    }

    pub(crate) fn record(
        &mut self,
        condition: &'static str,
        row: i64,
        column: Option<i64>,
        residual: f64,
        scale: f64,
        tol: &Tolerance,
    ) {
        let threshold = tol.threshold(scale);
        self.push(ConditionCheck {
            condition,
            row,
            column,
            residual,
            threshold,
            passed: residual <= threshold,
        });
    }

    pub(crate) fn push(&mut self, check: ConditionCheck) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub(crate) fn skip(&mut self, condition: &'static str, row: i64) {
        self.skipped.push(SkippedCheck { condition, row });
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn first_failure(&self) -> Option<&ConditionCheck> {
        self.failures().next()
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    /// Largest residual among checks of one condition.
    pub fn max_residual_of(&self, condition: &str) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.condition == condition)
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }
}
