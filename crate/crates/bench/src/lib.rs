//! Shared fixtures for the benchmarks in `benches/`.

use stitlab_core::processes::stit::stit_simulate;
use stitlab_core::processes::{l_sequence, StopRule};
use stitlab_core::{rng, ConvexPolygon, LSequence, LineMeasure, ProcessTrace};

pub fn square() -> ConvexPolygon {
    ConvexPolygon::unit_square()
}

pub fn iso() -> LineMeasure {
    LineMeasure::isotropic(1.0).expect("valid scale")
}

/// STIT trace with `jumps` jumps on the unit square.
pub fn stit_trace(jumps: usize, seed: u64) -> ProcessTrace {
    stit_simulate(&square(), &iso(), StopRule::MaxJumps(jumps), seed, &mut rng::master(seed))
        .expect("simulation succeeds")
}

/// L-sequence of a simulated configuration with `len` entries.
pub fn simulated_l(len: usize, seed: u64) -> LSequence {
    l_sequence(&stit_trace(len - 1, seed)).expect("valid trace")
}
