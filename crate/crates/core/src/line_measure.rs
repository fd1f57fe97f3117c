//! Translation-invariant line measures.
//!
//! Two families are supported: the isotropic measure `scale · dp dθ` on
//! `[0, π) × ℝ`, whose hitting measure of a convex set is `scale · perimeter`
//! (Cauchy's formula), and finite mixtures of directions where all lines are
//! parallel to one of the atoms and offsets are Lebesgue distributed.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexPolygon, Line, EPS_GEOM};

/// Rejection loops give up after this many rounds.
pub const MAX_REJECTIONS: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("isotropic scale must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("direction atom {index} is invalid (theta = {theta}, weight = {weight})")]
    BadAtom {
        index: usize,
        theta: f64,
        weight: f64,
    },
    #[error("direction mixture needs at least two distinct directions")]
    SingleDirection,
    #[error("line sampler stalled after {0} rejections")]
    SamplerStall(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionAtom {
    pub theta: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawMeasure {
    Isotropic { scale: f64 },
    Directions { atoms: Vec<DirectionAtom> },
}

/// The measure Λ on the space of lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMeasure", into = "RawMeasure")]
pub enum LineMeasure {
    Isotropic { scale: f64 },
    Directions { atoms: Vec<DirectionAtom> },
}

impl TryFrom<RawMeasure> for LineMeasure {
    type Error = MeasureError;

    fn try_from(raw: RawMeasure) -> Result<Self, Self::Error> {
        match raw {
            RawMeasure::Isotropic { scale } => LineMeasure::isotropic(scale),
            RawMeasure::Directions { atoms } => LineMeasure::directions(atoms),
        }
    }
}

impl From<LineMeasure> for RawMeasure {
    fn from(m: LineMeasure) -> Self {
        match m {
            LineMeasure::Isotropic { scale } => RawMeasure::Isotropic { scale },
            LineMeasure::Directions { atoms } => RawMeasure::Directions { atoms },
        }
    }
}

impl LineMeasure {
    pub fn isotropic(scale: f64) -> Result<Self, MeasureError> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(MeasureError::BadScale(scale));
        }
        Ok(LineMeasure::Isotropic { scale })
    }

    /// Mixture of directions; angles are folded into `[0, π)`.
    pub fn directions(atoms: Vec<DirectionAtom>) -> Result<Self, MeasureError> {
        let mut folded = Vec::with_capacity(atoms.len());
        for (index, a) in atoms.into_iter().enumerate() {
            if !(a.theta.is_finite() && a.weight.is_finite() && a.weight > 0.0) {
                return Err(MeasureError::BadAtom {
                    index,
                    theta: a.theta,
                    weight: a.weight,
                });
            }
            let theta = a.theta.rem_euclid(PI);
            let theta = if theta >= PI { 0.0 } else { theta };
            folded.push(DirectionAtom {
                theta,
                weight: a.weight,
            });
        }
        let distinct = folded
            .iter()
            .any(|a| (a.theta - folded[0].theta).abs() > 1e-12);
        if !distinct {
            return Err(MeasureError::SingleDirection);
        }
        Ok(LineMeasure::Directions { atoms: folded })
    }

    /// `Λ([K])`, the measure of lines hitting `poly`.
    pub fn hitting_measure(&self, poly: &ConvexPolygon) -> f64 {
        match self {
            LineMeasure::Isotropic { scale } => scale * poly.perimeter(),
            LineMeasure::Directions { atoms } => {
                atoms.iter().map(|a| a.weight * poly.width(a.theta)).sum()
            }
        }
    }

    /// Draws a line from `Λ(· ∩ [K]) / Λ([K])`.
    ///
    /// Lines that only graze the polygon or pass through the origin are
    /// redrawn; both events have probability zero.
    pub fn sample_hitting_line<R: Rng + ?Sized>(
        &self,
        poly: &ConvexPolygon,
        rng: &mut R,
    ) -> Result<Line, MeasureError> {
        let envelope = poly.diameter();
        let origin_tol = EPS_GEOM;
        let mut rounds = 0u64;
        loop {
            rounds += 1;
            if rounds > MAX_REJECTIONS {
                return Err(MeasureError::SamplerStall(MAX_REJECTIONS));
            }
            let theta = match self {
                LineMeasure::Isotropic { .. } => {
                    let theta = rng.gen::<f64>() * PI;
                    // the width never exceeds the diameter
                    if rng.gen::<f64>() * envelope > poly.width(theta) {
                        continue;
                    }
                    theta
                }
                LineMeasure::Directions { atoms } => {
                    let total: f64 = atoms.iter().map(|a| a.weight * poly.width(a.theta)).sum();
                    let mut u = rng.gen::<f64>() * total;
                    let mut chosen = atoms[atoms.len() - 1].theta;
                    for a in atoms {
                        let w = a.weight * poly.width(a.theta);
                        if u < w {
                            chosen = a.theta;
                            break;
                        }
                        u -= w;
                    }
                    chosen
                }
            };
            let (lo, hi) = poly.support_interval(theta);
            let p = lo + rng.gen::<f64>() * (hi - lo);
            let line = Line { theta, p };
            if p.abs() <= origin_tol || !poly.contains_line_hit(&line) {
                continue;
            }
            return Ok(line);
        }
    }
}
