//! STIT in continuous time.
//!
//! With cells `C_1..C_k` alive, the next split happens after an
//! `Exp(Σ Λ([C_j]))` waiting time and hits cell `j` with probability
//! `Λ([C_j]) / Σ Λ([C_i])`. By memorylessness this is the same law as giving
//! every cell its own `Exp(Λ([C_j]))` lifetime.

use rand::Rng;
use rand_distr::{Distribution, Exp};

use super::{split_by_random_line, ModelTag, ProcessError, ProcessTrace, StopRule, TraceEvent};
use crate::geometry::ConvexPolygon;
use crate::line_measure::LineMeasure;

/// Running STIT tessellation.
#[derive(Debug, Clone)]
pub struct Stit {
    measure: LineMeasure,
    cells: Vec<ConvexPolygon>,
    weights: Vec<f64>,
    time: f64,
}

impl Stit {
    pub fn new(window: &ConvexPolygon, measure: &LineMeasure) -> Self {
        Self {
            measure: measure.clone(),
            weights: vec![measure.hitting_measure(window)],
            cells: vec![window.clone()],
            time: 0.0,
        }
    }

    pub fn cells(&self) -> &[ConvexPolygon] {
        &self.cells
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn total_rate(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Performs the next split if it happens no later than `horizon`.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        horizon: f64,
        rng: &mut R,
    ) -> Result<Option<TraceEvent>, ProcessError> {
        let total = self.total_rate();
        let wait = Exp::new(total)
            .map_err(|_| ProcessError::InvalidStop(format!("bad total rate {total}")))?
            .sample(rng);
        let t = self.time + wait;
        if t > horizon {
            return Ok(None);
        }
        let mut u = rng.gen::<f64>() * total;
        let mut chosen = self.cells.len() - 1;
        for (j, &w) in self.weights.iter().enumerate() {
            if u < w {
                chosen = j;
                break;
            }
            u -= w;
        }
        let (line, positive, negative) = split_by_random_line(&self.cells[chosen], &self.measure, rng)?;
        self.weights[chosen] = self.measure.hitting_measure(&negative);
        self.cells[chosen] = negative;
        self.weights.push(self.measure.hitting_measure(&positive));
        self.cells.push(positive);
        self.time = t;
        Ok(Some(TraceEvent {
            t: Some(t),
            n: None,
            cell: chosen,
            line,
            jump: true,
        }))
    }
}

/// Simulates STIT in `window` until the stop rule fires.
pub fn stit_simulate<R: Rng + ?Sized>(
    window: &ConvexPolygon,
    measure: &LineMeasure,
    stop: StopRule,
    seed: u64,
    rng: &mut R,
) -> Result<ProcessTrace, ProcessError> {
    let (horizon, max_jumps) = match stop {
        StopRule::MaxTime(t) if t >= 0.0 && t.is_finite() => (t, usize::MAX),
        StopRule::MaxJumps(n) => (f64::INFINITY, n),
        other => {
            return Err(ProcessError::InvalidStop(format!(
                "STIT accepts a finite time or a jump count, got {other:?}"
            )))
        }
    };
    let mut trace = ProcessTrace::new(window.clone(), measure.clone(), ModelTag::Stit, seed);
    let mut stit = Stit::new(window, measure);
    while trace.events.len() < max_jumps {
        match stit.step(horizon, rng)? {
            Some(e) => trace.events.push(e),
            None => break,
        }
    }
    Ok(trace)
}
