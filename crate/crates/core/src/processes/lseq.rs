use serde::{Deserialize, Serialize};

use super::ProcessError;

/// Minimum relative gap between consecutive L values.
pub const DELTA_L: f64 = 1e-9;

/// Normalized cumulative hitting measures `L_1, ..., L_ℓ` of a cell
/// configuration sequence, together with the window rate `Λ([W])`.
///
/// `L_k` is the total hitting measure of the `k` cells present before the
/// `k`-th jump divided by `Λ([W])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LSequence {
    values: Vec<f64>,
    rate: f64,
}

impl LSequence {
    pub fn new(values: Vec<f64>, rate: f64) -> Result<Self, ProcessError> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(ProcessError::InvalidLSequence(format!(
                "rate must be positive, got {rate}"
            )));
        }
        match values.first() {
            None => {
                return Err(ProcessError::InvalidLSequence(
                    "empty L-sequence".to_string(),
                ))
            }
            Some(&first) if first != 1.0 => {
                return Err(ProcessError::InvalidLSequence(format!(
                    "L_1 must be exactly 1, got {first}"
                )))
            }
            _ => {}
        }
        for (i, &v) in values.iter().enumerate() {
            let k = (i + 1) as f64;
            if !v.is_finite() || v < 1.0 || v > k * (1.0 + 1e-12) {
                return Err(ProcessError::InvalidLSequence(format!(
                    "L_{} = {v} outside [1, {k}]",
                    i + 1
                )));
            }
        }
        for (i, w) in values.windows(2).enumerate() {
            let gap = (w[1] - w[0]) / w[1];
            if gap < DELTA_L {
                return Err(ProcessError::LCollision {
                    index: i + 2,
                    gap,
                });
            }
        }
        Ok(Self { values, rate })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `L_k` with one-based `k`.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    /// The first `n` values as a new sequence.
    pub fn prefix(&self, n: usize) -> LSequence {
        LSequence {
            values: self.values[..n.min(self.values.len())].to_vec(),
            rate: self.rate,
        }
    }
}
