//! Closed-form laws of jump times and jump counts.
//!
//! Alternating Lagrange-type sums are accumulated with compensated summation
//! and come with a cancellation estimate `Σ|term| / max(|Σ term|, 1)`; a
//! result whose estimate exceeds [`NumericLimits::max_condition`] is refused
//! instead of returned with unknown accuracy. All ratios of Gamma functions
//! reduce to finite products of `(k - L)` factors.

mod counts;
mod identities;
mod mecke;
mod stit;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use counts::{cowan_count_pmf, cowan_sum_cdf, nu_pmf, nu_tail};
pub use identities::{
    verify_binomial_gamma_identity, verify_lagrange_gamma_identity, verify_lagrange_identity,
    verify_telescoping_identity,
};
pub use mecke::{
    discrete_jump_pmf, discrete_jump_pmf_with, discrete_waiting_pmf, jump_pmf_mass,
    mecke_jump_tail, waiting_pmf_mass, DiscreteJumpSeries, Mass,
};
pub use stit::{stit_jump_cdf, stit_jump_cdf_with, stit_jump_pdf, stit_jump_pdf_with};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("sequence index {index} exceeds the precision limit {max}")]
    TooLong { index: usize, max: usize },
    #[error("cancellation estimate {condition:.3e} exceeds {limit:.1e}")]
    IllConditioned { condition: f64, limit: f64 },
    #[error("value {0} outside [0, 1] beyond rounding")]
    OutOfRange(f64),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("series not within tail bound {bound:e} after {terms} terms")]
    TruncationFailure { terms: u64, bound: f64 },
    #[error("invalid truncation policy: {0}")]
    InvalidPolicy(String),
}

/// When to stop summing an infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationPolicy {
    pub tail_bound: f64,
    pub max_terms: u64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tail_bound: 1e-10,
            max_terms: 1_000_000,
        }
    }
}

impl TruncationPolicy {
    pub fn new(tail_bound: f64, max_terms: u64) -> Result<Self, DistributionError> {
        let p = Self {
            tail_bound,
            max_terms,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DistributionError> {
        if !(self.tail_bound > 0.0 && self.tail_bound < 1e-6) {
            return Err(DistributionError::InvalidPolicy(format!(
                "tail_bound must lie in (0, 1e-6), got {}",
                self.tail_bound
            )));
        }
        if self.max_terms < 10 {
            return Err(DistributionError::InvalidPolicy(format!(
                "max_terms must be at least 10, got {}",
                self.max_terms
            )));
        }
        Ok(())
    }
}

/// Precision limits for the alternating sums in double precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericLimits {
    /// Largest `n` for the STIT jump-time law.
    pub n_max: usize,
    /// Largest `ℓ` for the discrete jump-time law.
    pub ell_max: usize,
    pub max_condition: f64,
}

impl Default for NumericLimits {
    fn default() -> Self {
        Self {
            n_max: 15,
            ell_max: 12,
            max_condition: 1e8,
        }
    }
}

impl NumericLimits {
    fn check(&self, condition: f64) -> Result<(), DistributionError> {
        if condition > self.max_condition || !condition.is_finite() {
            return Err(DistributionError::IllConditioned {
                condition,
                limit: self.max_condition,
            });
        }
        Ok(())
    }
}

/// Snaps rounding noise at the edges of `[0, 1]`.
fn clamp_probability(x: f64) -> Result<f64, DistributionError> {
    const SLACK: f64 = 1e-9;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else if (-SLACK..0.0).contains(&x) {
        Ok(0.0)
    } else if x > 1.0 && x <= 1.0 + SLACK {
        Ok(1.0)
    } else {
        Err(DistributionError::OutOfRange(x))
    }
}

fn check_time(t: f64) -> Result<(), DistributionError> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(DistributionError::DomainError(format!("time must be finite and >= 0, got {t}")))
    }
}

fn check_rate(rate: f64) -> Result<(), DistributionError> {
    if rate > 0.0 && rate.is_finite() {
        Ok(())
    } else {
        Err(DistributionError::DomainError(format!("rate must be positive, got {rate}")))
    }
}
