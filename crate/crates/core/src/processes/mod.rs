//! The tessellation processes.
//!
//! * [`stit`]: STIT in continuous time, driven by a single race of
//!   exponential clocks whose rate is the total hitting measure of the cells.
//! * [`mecke`]: Mecke's discrete-time process on quasi-cells and its
//!   continuous-time version obtained by running decisions on Cowan's clock.
//! * [`cowan`]: the equally-likely process and its jump-count clock.
//! * [`conditional`]: resimulation of the time layer for a frozen
//!   L-sequence.
//!
//! All simulators record a [`ProcessTrace`]. Cells live in an indexed slot
//! list; a split replaces slot `cell` by the part away from the origin and
//! appends the part on the origin side. Empty quasi-cells are `None` slots.

pub mod conditional;
pub mod cowan;
mod lseq;
pub mod mecke;
pub mod stit;
mod trace;

pub use lseq::{LSequence, DELTA_L};
pub use trace::{read_trace_jsonl, write_trace_jsonl, TraceHeader};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexPolygon, GeometryError, Line, Point};
use crate::line_measure::{LineMeasure, MeasureError};

/// Maximum redraws of a line after a degenerate split.
const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Error)]
pub enum ProcessError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("L-sequence collision at L_{index} (relative gap {gap:e})")]
    LCollision { index: usize, gap: f64 },
    #[error("invalid L-sequence: {0}")]
    InvalidLSequence(String),
    #[error("invalid stop rule: {0}")]
    InvalidStop(String),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error("trace I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("trace JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelTag {
    #[serde(rename = "STIT")]
    Stit,
    MeckeDiscrete,
    MeckeContinuous,
    #[serde(rename = "CowanEL")]
    CowanEl,
}

/// When a simulation ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Continuous models: run until this time.
    MaxTime(f64),
    MaxJumps(usize),
    /// Mecke discrete time: run this many decisions.
    MaxDecisions(u64),
}

/// One record of a trace.
///
/// Continuous models set `t`, the discrete model sets `n`; Mecke's
/// continuous-time process sets both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEvent {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u64>,
    pub cell: usize,
    pub line: Line,
    pub jump: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessTrace {
    pub window: ConvexPolygon,
    pub measure: LineMeasure,
    pub model_tag: ModelTag,
    pub seed: u64,
    pub events: Vec<TraceEvent>,
}

impl ProcessTrace {
    pub fn new(window: ConvexPolygon, measure: LineMeasure, model_tag: ModelTag, seed: u64) -> Self {
        Self {
            window,
            measure,
            model_tag,
            seed,
            events: Vec::new(),
        }
    }

    pub fn jump_count(&self) -> usize {
        self.events.iter().filter(|e| e.jump).count()
    }

    /// Replays the events and returns the final cell list.
    pub fn final_cells(&self) -> Result<Vec<ConvexPolygon>, ProcessError> {
        let mut replay = Replay::new(&self.window);
        for e in &self.events {
            replay.apply(e)?;
        }
        Ok(replay.into_cells())
    }

    /// Checks ordering of times and decision indices.
    pub fn check_order(&self) -> Result<(), ProcessError> {
        for w in self.events.windows(2) {
            if let (Some(a), Some(b)) = (w[0].t, w[1].t) {
                if !(b > a) {
                    return Err(ProcessError::MalformedTrace(format!(
                        "event times not increasing: {a} then {b}"
                    )));
                }
            }
            if let (Some(a), Some(b)) = (w[0].n, w[1].n) {
                if b <= a {
                    return Err(ProcessError::MalformedTrace(format!(
                        "decision indices not increasing: {a} then {b}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Rebuilds slot states from trace events.
#[derive(Debug, Clone)]
pub struct Replay {
    slots: Vec<Option<ConvexPolygon>>,
}

impl Replay {
    pub fn new(window: &ConvexPolygon) -> Self {
        Self {
            slots: vec![Some(window.clone())],
        }
    }

    pub fn slots(&self) -> &[Option<ConvexPolygon>] {
        &self.slots
    }

    pub fn cells(&self) -> impl Iterator<Item = &ConvexPolygon> {
        self.slots.iter().flatten()
    }

    pub fn into_cells(self) -> Vec<ConvexPolygon> {
        self.slots.into_iter().flatten().collect()
    }

    /// Applies one event; returns the chord drawn if the event is a jump.
    pub fn apply(&mut self, event: &TraceEvent) -> Result<Option<(Point, Point)>, ProcessError> {
        let slot = self.slots.get_mut(event.cell).ok_or_else(|| {
            ProcessError::MalformedTrace(format!("cell index {} out of range", event.cell))
        })?;
        let (chord, appended) = match slot.take() {
            None => (None, None),
            Some(cell) => {
                let split = cell.split(&event.line)?;
                *slot = split.negative;
                (split.chord, split.positive)
            }
        };
        self.slots.push(appended);
        if chord.is_some() != event.jump {
            return Err(ProcessError::MalformedTrace(format!(
                "event on cell {} has jump = {} but replay disagrees",
                event.cell, event.jump
            )));
        }
        Ok(chord)
    }
}

/// Splits `cell` by a line from its own hitting distribution, redrawing on
/// the probability-zero degenerate cases.
pub(crate) fn split_by_random_line<R: rand::Rng + ?Sized>(
    cell: &ConvexPolygon,
    measure: &LineMeasure,
    rng: &mut R,
) -> Result<(Line, ConvexPolygon, ConvexPolygon), ProcessError> {
    let mut last = None;
    for _ in 0..MAX_RESAMPLES {
        let line = measure.sample_hitting_line(cell, rng)?;
        match cell.split(&line) {
            Ok(s) if s.is_cut() => {
                return Ok((line, s.positive.unwrap(), s.negative.unwrap()));
            }
            Ok(_) => {}
            Err(e @ (GeometryError::DegenerateSplit(_) | GeometryError::LineThroughOrigin(_))) => {
                last = Some(e)
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(last
        .unwrap_or(GeometryError::DegenerateSplit(0.0))
        .into())
}

/// L-sequence `L_1, ..., L_{J+1}` of a trace with `J` jumps.
pub fn l_sequence(trace: &ProcessTrace) -> Result<LSequence, ProcessError> {
    let rate = trace.measure.hitting_measure(&trace.window);
    let total = |r: &Replay| -> f64 {
        r.cells()
            .map(|c| trace.measure.hitting_measure(c))
            .sum::<f64>()
    };
    let mut replay = Replay::new(&trace.window);
    let mut values = vec![1.0];
    for e in &trace.events {
        if replay.apply(e)?.is_some() {
            values.push(total(&replay) / rate);
        }
    }
    LSequence::new(values, rate)
}
