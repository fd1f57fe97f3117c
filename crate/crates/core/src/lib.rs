//! Simulation and verification of STIT, Mecke and equally-likely
//! tessellations in a convex window.

pub mod distributions;
pub mod geometry;
pub mod io;
pub mod line_measure;
pub mod numeric;
pub mod processes;
pub mod render;
pub mod rng;
pub mod stats;

pub use distributions::{DistributionError, NumericLimits, TruncationPolicy};
pub use io::{ConfigError, Experiment, ExperimentConfig, Model};
pub use geometry::{ConvexPolygon, GeometryError, Line, Point, SplitResult};
pub use line_measure::{DirectionAtom, LineMeasure, MeasureError};
pub use stats::{SuiteConfig, VerificationReport};
pub use processes::{
    LSequence, ModelTag, ProcessError, ProcessTrace, StopRule, TraceEvent, TraceHeader,
};
