//! Cowan's equally-likely process and its jump clock.
//!
//! With `k` cells each carrying an `Exp(rate)` lifetime, the state waits
//! `Exp(k · rate)` before the next division. The resulting jump counts are
//! geometric, which is exactly the law of the number of Mecke decisions up to
//! a given time; [`DecisionClock`] therefore drives both models.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::{split_by_random_line, ModelTag, ProcessError, ProcessTrace, StopRule, TraceEvent};
use crate::geometry::ConvexPolygon;
use crate::line_measure::LineMeasure;

/// How waiting times between decisions are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClockKind {
    /// `Exp(k · rate)` with `k` the current number of units.
    Cowan,
    /// Mutation: homogeneous `Exp(rate)` waits.
    PoissonMutant,
    /// Mutation: Cowan clock at `factor · rate`.
    WrongRateMutant(f64),
}

#[derive(Debug, Clone)]
pub struct DecisionClock {
    rate: f64,
    kind: ClockKind,
    time: f64,
    ticks: u64,
}

impl DecisionClock {
    pub fn new(rate: f64, kind: ClockKind) -> Self {
        assert!(rate > 0.0 && rate.is_finite(), "clock rate must be positive");
        Self {
            rate,
            kind,
            time: 0.0,
            ticks: 0,
        }
    }

    pub fn cowan(rate: f64) -> Self {
        Self::new(rate, ClockKind::Cowan)
    }

    pub fn ticks(&self) -> u64 {
        self.ticks
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Time of the next tick; advances the clock.
    pub fn next_tick<R: Rng + ?Sized>(&mut self, rng: &mut R) -> f64 {
        let units = (self.ticks + 1) as f64;
        let rate = match self.kind {
            ClockKind::Cowan => units * self.rate,
            ClockKind::PoissonMutant => self.rate,
            ClockKind::WrongRateMutant(f) => units * self.rate * f,
        };
        let wait = Exp::new(rate).expect("positive rate").sample(rng);
        self.time += wait;
        self.ticks += 1;
        self.time
    }
}

/// Number `N_t` of jumps up to time `t` of the equally-likely process with
/// cell rate `rate`.
pub fn cowan_jump_count<R: Rng + ?Sized>(rate: f64, t: f64, rng: &mut R) -> u64 {
    assert!(t >= 0.0, "time must be nonnegative");
    let mut clock = DecisionClock::cowan(rate);
    let mut count = 0;
    while clock.next_tick(rng) <= t {
        count += 1;
    }
    count
}

/// Equally-likely tessellation: a uniformly chosen cell splits at each jump,
/// by a line from its own hitting distribution.
pub fn cowan_simulate<R: Rng + ?Sized>(
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
                "Cowan accepts a finite time or a jump count, got {other:?}"
            )))
        }
    };
    let rate = measure.hitting_measure(window);
    let mut clock = DecisionClock::cowan(rate);
    let mut cells = vec![window.clone()];
    let mut trace = ProcessTrace::new(window.clone(), measure.clone(), ModelTag::CowanEl, seed);
    while trace.events.len() < max_jumps {
        let t = clock.next_tick(rng);
        if t > horizon {
            break;
        }
        let chosen = rng.gen_range(0..cells.len());
        let (line, positive, negative) = split_by_random_line(&cells[chosen], measure, rng)?;
        cells[chosen] = negative;
        cells.push(positive);
        trace.events.push(TraceEvent {
            t: Some(t),
            n: None,
            cell: chosen,
            line,
            jump: true,
        });
    }
    Ok(trace)
}
