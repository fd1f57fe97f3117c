//! Goodness-of-fit machinery and the Monte Carlo equivalence harness.

mod gof;
mod suite;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gof::{
    chi_square_gof, histogram, kolmogorov_sf, ks_statistic, ks_test, two_sample_chi_square,
    ChiSquare,
};
pub use suite::{identity_reports, run_equivalence_suite, SuiteConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("only {0} bin(s) left after merging")]
    DegenerateBins(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Outcome of one identity check or goodness-of-fit test.
///
/// With a p-value the check passes iff `p_value > tolerance`; without one
/// it passes iff `statistic <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub check_name: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub sample_size: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerificationReport {
    fn verdict(statistic: f64, p_value: Option<f64>, tolerance: f64) -> bool {
        match p_value {
            Some(p) => p > tolerance,
            None => statistic <= tolerance,
        }
    }

    pub fn with_p_value(
        name: impl Into<String>,
        statistic: f64,
        p_value: f64,
        alpha: f64,
        sample_size: u64,
        seed: u64,
    ) -> Self {
        Self {
            check_name: name.into(),
            statistic,
            p_value: Some(p_value),
            tolerance: alpha,
            passed: Self::verdict(statistic, Some(p_value), alpha),
            sample_size,
            seed,
            error: None,
        }
    }

    pub fn with_bound(
        name: impl Into<String>,
        statistic: f64,
        tolerance: f64,
        sample_size: u64,
        seed: u64,
    ) -> Self {
        Self {
            check_name: name.into(),
            statistic,
            p_value: None,
            tolerance,
            passed: Self::verdict(statistic, None, tolerance),
            sample_size,
            seed,
            error: None,
        }
    }

    /// A check that could not be carried out.
    pub fn errored(name: impl Into<String>, error: impl ToString, tolerance: f64, seed: u64) -> Self {
        Self {
            check_name: name.into(),
            statistic: f64::NAN,
            p_value: None,
            tolerance,
            passed: false,
            sample_size: 0,
            seed,
            error: Some(error.to_string()),
        }
    }

    /// True when `passed` agrees with statistic, p-value and tolerance.
    pub fn is_consistent(&self) -> bool {
        self.error.is_some() && !self.passed
            || self.error.is_none() && self.passed == Self::verdict(self.statistic, self.p_value, self.tolerance)
    }
}

/// Fixed-width text table, one line per report.
pub fn render_table(reports: &[VerificationReport]) -> String {
    let width = reports
        .iter()
        .map(|r| r.check_name.chars().count())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut out = format!(
        "{:<width$}  {:>12}  {:>10}  {:>9}  {:>9}  {}\n",
        "check", "statistic", "p-value", "tolerance", "n", "result"
    );
    for r in reports {
        let p = r.p_value.map_or_else(|| "-".to_string(), |p| format!("{p:.4e}"));
        let verdict = match (&r.error, r.passed) {
            (Some(e), _) => format!("ERROR ({e})"),
            (None, true) => "pass".to_string(),
            (None, false) => "FAIL".to_string(),
        };
        out.push_str(&format!(
            "{:<width$}  {:>12.4e}  {:>10}  {:>9.1e}  {:>9}  {}\n",
            r.check_name, r.statistic, p, r.tolerance, r.sample_size, verdict
        ));
    }
    out
}
