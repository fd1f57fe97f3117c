//! Mecke's process on quasi-cells.
//!
//! After `n - 1` decisions there are `n` quasi-cells. Decision `n` draws an
//! index `α` uniformly from `1..=n` and a line `γ` from the hitting
//! distribution of the window, independently. Quasi-cell `α` is replaced by
//! its part away from the origin and its part on the origin side is appended.
//! The number of cells grows only when `α` points at a cell that `γ` cuts.
//!
//! In continuous time, decisions happen at the ticks of a Cowan clock with
//! rate `Λ([W])`.

use rand::{Rng, SeedableRng};

use super::cowan::{ClockKind, DecisionClock};
use super::{ModelTag, ProcessError, ProcessTrace, StopRule, TraceEvent};
use crate::geometry::{ConvexPolygon, Line};
use crate::line_measure::LineMeasure;
use crate::rng::SimRng;

/// State after `decision_count` decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiCellState {
    quasi_cells: Vec<Option<ConvexPolygon>>,
    decision_count: u64,
    jump_count: usize,
}

/// Outcome of one decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    /// Zero-based index of the selected quasi-cell.
    pub selected: usize,
    pub line: Line,
    pub jump: bool,
}

impl QuasiCellState {
    pub fn new(window: &ConvexPolygon) -> Self {
        Self {
            quasi_cells: vec![Some(window.clone())],
            decision_count: 0,
            jump_count: 0,
        }
    }

    /// A state with the given quasi-cells after `quasi_cells.len() - 1`
    /// decisions.
    pub fn from_quasi_cells(quasi_cells: Vec<Option<ConvexPolygon>>) -> Self {
        assert!(!quasi_cells.is_empty(), "need at least one quasi-cell");
        let cells = quasi_cells.iter().flatten().count();
        Self {
            decision_count: (quasi_cells.len() - 1) as u64,
            jump_count: cells.saturating_sub(1),
            quasi_cells,
        }
    }

    pub fn quasi_cells(&self) -> &[Option<ConvexPolygon>] {
        &self.quasi_cells
    }

    pub fn cells(&self) -> impl Iterator<Item = &ConvexPolygon> {
        self.quasi_cells.iter().flatten()
    }

    pub fn cell_count(&self) -> usize {
        self.jump_count + 1
    }

    pub fn decision_count(&self) -> u64 {
        self.decision_count
    }

    pub fn jump_count(&self) -> usize {
        self.jump_count
    }

    /// Performs decision `decision_count + 1`.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        window: &ConvexPolygon,
        measure: &LineMeasure,
        rng: &mut R,
    ) -> Result<Decision, ProcessError> {
        let n = self.quasi_cells.len();
        let selected = rng.gen_range(0..n);
        loop {
            let line = measure.sample_hitting_line(window, rng)?;
            let (kept, appended, jump) = match &self.quasi_cells[selected] {
                None => (None, None, false),
                Some(cell) => match cell.split(&line) {
                    Ok(s) => {
                        let jump = s.is_cut();
                        (s.negative, s.positive, jump)
                    }
                    // probability zero: redraw the line
                    Err(_) => continue,
                },
            };
            self.quasi_cells[selected] = kept;
            self.quasi_cells.push(appended);
            self.decision_count += 1;
            if jump {
                self.jump_count += 1;
            }
            return Ok(Decision {
                selected,
                line,
                jump,
            });
        }
    }

    /// Sum of cell areas divided by `area`; 1 when the cells tile a window
    /// of that area.
    pub fn tiling_ratio(&self, area: f64) -> f64 {
        self.cells().map(|c| c.area()).sum::<f64>() / area
    }
}

/// One decision on an owned state.
pub fn mecke_discrete_step<R: Rng + ?Sized>(
    mut state: QuasiCellState,
    measure: &LineMeasure,
    window: &ConvexPolygon,
    rng: &mut R,
) -> Result<(QuasiCellState, Decision), ProcessError> {
    let d = state.step(window, measure, rng)?;
    Ok((state, d))
}

/// Runs Mecke's discrete process; every decision is recorded with its index
/// in `n`.
pub fn mecke_discrete_simulate<R: Rng + ?Sized>(
    window: &ConvexPolygon,
    measure: &LineMeasure,
    stop: StopRule,
    seed: u64,
    rng: &mut R,
) -> Result<(QuasiCellState, ProcessTrace), ProcessError> {
    let (max_decisions, max_jumps) = match stop {
        StopRule::MaxDecisions(d) => (d, usize::MAX),
        StopRule::MaxJumps(j) => (u64::MAX, j),
        other => {
            return Err(ProcessError::InvalidStop(format!(
                "Mecke discrete time accepts decisions or jumps, got {other:?}"
            )))
        }
    };
    let mut trace = ProcessTrace::new(window.clone(), measure.clone(), ModelTag::MeckeDiscrete, seed);
    let mut state = QuasiCellState::new(window);
    while state.decision_count() < max_decisions && state.jump_count() < max_jumps {
        let d = state.step(window, measure, rng)?;
        trace.events.push(TraceEvent {
            t: None,
            n: Some(state.decision_count()),
            cell: d.selected,
            line: d.line,
            jump: d.jump,
        });
    }
    Ok((state, trace))
}

/// Mecke's process in continuous time: discrete decisions placed at the ticks
/// of a decision clock.
///
/// The clock and the geometry use separate streams split off the seed
/// generator, so advancing to `t₂ > t₁` extends the trajectory seen at `t₁`.
#[derive(Debug, Clone)]
pub struct MeckeContinuous {
    window: ConvexPolygon,
    measure: LineMeasure,
    state: QuasiCellState,
    clock: DecisionClock,
    clock_rng: SimRng,
    geometry_rng: SimRng,
    next_tick: f64,
    trace: ProcessTrace,
}

impl MeckeContinuous {
    pub fn new<R: Rng + ?Sized>(
        window: &ConvexPolygon,
        measure: &LineMeasure,
        clock: ClockKind,
        seed: u64,
        rng: &mut R,
    ) -> Self {
        let rate = measure.hitting_measure(window);
        let mut clock_rng = SimRng::seed_from_u64(rng.gen());
        let geometry_rng = SimRng::seed_from_u64(rng.gen());
        let mut clock = DecisionClock::new(rate, clock);
        let next_tick = clock.next_tick(&mut clock_rng);
        Self {
            window: window.clone(),
            measure: measure.clone(),
            state: QuasiCellState::new(window),
            clock,
            clock_rng,
            geometry_rng,
            next_tick,
            trace: ProcessTrace::new(window.clone(), measure.clone(), ModelTag::MeckeContinuous, seed),
        }
    }

    pub fn state(&self) -> &QuasiCellState {
        &self.state
    }

    pub fn trace(&self) -> &ProcessTrace {
        &self.trace
    }

    /// Runs every decision with tick time `<= t`.
    pub fn advance_to(&mut self, t: f64) -> Result<&QuasiCellState, ProcessError> {
        while self.next_tick <= t {
            let d = self
                .state
                .step(&self.window, &self.measure, &mut self.geometry_rng)?;
            self.trace.events.push(TraceEvent {
                t: Some(self.next_tick),
                n: Some(self.state.decision_count()),
                cell: d.selected,
                line: d.line,
                jump: d.jump,
            });
            self.next_tick = self.clock.next_tick(&mut self.clock_rng);
        }
        Ok(&self.state)
    }

    pub fn into_parts(self) -> (QuasiCellState, ProcessTrace) {
        (self.state, self.trace)
    }
}

/// State of Mecke's continuous-time process at time `t`.
pub fn mecke_continuous_simulate<R: Rng + ?Sized>(
    window: &ConvexPolygon,
    measure: &LineMeasure,
    t: f64,
    seed: u64,
    rng: &mut R,
) -> Result<(QuasiCellState, ProcessTrace), ProcessError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(ProcessError::InvalidStop(format!("bad time {t}")));
    }
    let mut process = MeckeContinuous::new(window, measure, ClockKind::Cowan, seed, rng);
    process.advance_to(t)?;
    Ok(process.into_parts())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (ConvexPolygon, LineMeasure) {
        (
            ConvexPolygon::unit_square(),
            LineMeasure::isotropic(1.0).unwrap(),
        )
    }

    #[test]
    fn first_decision_always_jumps() {
        let (w, m) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..500 {
            let (s, d) = mecke_discrete_step(QuasiCellState::new(&w), &m, &w, &mut rng).unwrap();
            assert!(d.jump);
            assert_eq!(s.cell_count(), 2);
            assert_eq!(s.quasi_cells().len(), 2);
        }
    }

    #[test]
    fn empty_quasi_cell_never_jumps() {
        let (w, m) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let state = QuasiCellState::from_quasi_cells(vec![None, Some(w.clone())]);
        let mut seen = 0;
        for _ in 0..200 {
            let mut s = state.clone();
            let d = s.step(&w, &m, &mut rng).unwrap();
            if d.selected == 0 {
                seen += 1;
                assert!(!d.jump);
                assert_eq!(s.quasi_cells().len(), 3);
                assert_eq!(s.cell_count(), 1);
                assert_eq!(s.cells().next(), Some(&w));
            }
        }
        assert!(seen > 50);
    }

    #[test]
    fn counts_and_tiling_hold_along_a_run() {
        let (w, m) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut state = QuasiCellState::new(&w);
        for _ in 0..300 {
            state.step(&w, &m, &mut rng).unwrap();
            assert_eq!(state.quasi_cells().len() as u64, state.decision_count() + 1);
            assert_eq!(state.cells().count(), state.jump_count() + 1);
            assert!((state.tiling_ratio(w.area()) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn discrete_trace_replays_to_same_cells() {
        let (w, m) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (state, trace) =
            mecke_discrete_simulate(&w, &m, StopRule::MaxJumps(15), 4, &mut rng).unwrap();
        assert_eq!(state.jump_count(), 15);
        assert_eq!(trace.events[0].n, Some(1));
        assert!(trace.events[0].jump);
        let replayed = trace.final_cells().unwrap();
        let direct: Vec<_> = state.cells().cloned().collect();
        assert_eq!(replayed, direct);
    }

    #[test]
    fn continuous_time_zero_is_bare_window() {
        let (w, m) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (state, trace) = mecke_continuous_simulate(&w, &m, 0.0, 5, &mut rng).unwrap();
        assert_eq!(state.decision_count(), 0);
        assert!(trace.events.is_empty());
        assert_eq!(trace.model_tag, ModelTag::MeckeContinuous);
    }

    #[test]
    fn continuous_process_extends_its_trajectory() {
        let (w, m) = setup();
        let mut a = MeckeContinuous::new(&w, &m, ClockKind::Cowan, 6, &mut ChaCha8Rng::seed_from_u64(6));
        let mut b = a.clone();
        a.advance_to(0.3).unwrap();
        let at_first = a.trace().events.clone();
        a.advance_to(0.6).unwrap();
        b.advance_to(0.6).unwrap();
        assert_eq!(a.trace().events, b.trace().events);
        assert_eq!(&a.trace().events[..at_first.len()], &at_first[..]);
        assert!(a.trace().events.iter().skip(at_first.len()).all(|e| e.t.unwrap() > 0.3));
    }
}
