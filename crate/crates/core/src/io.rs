//! Experiment configuration and the textual shortcuts for windows and line
//! measures.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexPolygon, Point};
use crate::line_measure::{DirectionAtom, LineMeasure};
use crate::processes::cowan::cowan_simulate;
use crate::processes::mecke::{mecke_continuous_simulate, mecke_discrete_simulate};
use crate::processes::stit::stit_simulate;
use crate::processes::{ModelTag, ProcessError, ProcessTrace, StopRule};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown window {0:?} (use unit-square, triangle or \"x,y;x,y;...\")")]
    UnknownWindow(String),
    #[error("invalid window: {0}")]
    BadWindow(String),
    #[error("invalid measure {spec:?}: {reason}")]
    BadMeasure { spec: String, reason: String },
    #[error("invalid stop rule: {0}")]
    BadStop(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Parses `unit-square`, `triangle` or an explicit vertex list `x,y;x,y;...`.
pub fn parse_window(spec: &str) -> Result<ConvexPolygon, ConfigError> {
    match spec.trim() {
        "unit-square" | "square" => return Ok(ConvexPolygon::unit_square()),
        "triangle" | "unit-triangle" => return Ok(ConvexPolygon::unit_triangle()),
        _ => {}
    }
    if !spec.contains(',') {
        return Err(ConfigError::UnknownWindow(spec.to_string()));
    }
    let vertices = spec
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let mut it = pair.split(',').map(|v| f64::from_str(v.trim()));
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(x)), Some(Ok(y)), None) => Ok(Point::new(x, y)),
                _ => Err(ConfigError::BadWindow(format!("bad vertex {pair:?}"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    ConvexPolygon::new(vertices).map_err(|e| ConfigError::BadWindow(e.to_string()))
}

/// Parses `iso:<scale>` or `dirs:<theta>:<weight>,<theta>:<weight>,...`.
pub fn parse_measure(spec: &str) -> Result<LineMeasure, ConfigError> {
    let bad = |reason: &str| ConfigError::BadMeasure {
        spec: spec.to_string(),
        reason: reason.to_string(),
    };
    let (kind, rest) = spec.trim().split_once(':').ok_or_else(|| bad("expected iso:<scale> or dirs:..."))?;
    match kind {
        "iso" => {
            let scale = f64::from_str(rest.trim()).map_err(|_| bad("scale is not a number"))?;
            LineMeasure::isotropic(scale).map_err(|e| bad(&e.to_string()))
        }
        "dirs" => {
            let atoms = rest
                .split(',')
                .map(|atom| {
                    let (theta, weight) = atom.split_once(':').ok_or_else(|| bad("atoms are theta:weight"))?;
                    let theta = f64::from_str(theta.trim()).map_err(|_| bad("theta is not a number"))?;
                    let weight = f64::from_str(weight.trim()).map_err(|_| bad("weight is not a number"))?;
                    Ok(DirectionAtom { theta, weight })
                })
                .collect::<Result<Vec<_>, ConfigError>>()?;
            LineMeasure::directions(atoms).map_err(|e| bad(&e.to_string()))
        }
        _ => Err(bad("unknown measure family")),
    }
}

/// A window given either as a shortcut string or as a vertex object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowSpec {
    Named(String),
    Polygon(ConvexPolygon),
}

impl WindowSpec {
    pub fn resolve(&self) -> Result<ConvexPolygon, ConfigError> {
        match self {
            WindowSpec::Named(s) => parse_window(s),
            WindowSpec::Polygon(p) => Ok(p.clone()),
        }
    }
}

/// A measure given either as a shortcut string or as a JSON object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpec {
    Named(String),
    Measure(LineMeasure),
}

impl MeasureSpec {
    pub fn resolve(&self) -> Result<LineMeasure, ConfigError> {
        match self {
            MeasureSpec::Named(s) => parse_measure(s),
            MeasureSpec::Measure(m) => Ok(m.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Stit,
    MeckeDiscrete,
    MeckeContinuous,
    Cowan,
}

impl Model {
    pub fn tag(self) -> ModelTag {
        match self {
            Model::Stit => ModelTag::Stit,
            Model::MeckeDiscrete => ModelTag::MeckeDiscrete,
            Model::MeckeContinuous => ModelTag::MeckeContinuous,
            Model::Cowan => ModelTag::CowanEl,
        }
    }
}

impl FromStr for Model {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| ConfigError::Invalid(format!("unknown model {s:?}")))
    }
}

/// Exactly one of the fields must be set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StopSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jumps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decisions: Option<u64>,
}

impl StopSpec {
    pub fn rule(&self) -> Result<StopRule, ConfigError> {
        match (self.time, self.jumps, self.decisions) {
            (Some(t), None, None) if t.is_finite() && t >= 0.0 => Ok(StopRule::MaxTime(t)),
            (Some(t), None, None) => Err(ConfigError::BadStop(format!("time must be finite and >= 0, got {t}"))),
            (None, Some(j), None) => Ok(StopRule::MaxJumps(j)),
            (None, None, Some(d)) => Ok(StopRule::MaxDecisions(d)),
            (None, None, None) => Err(ConfigError::BadStop("give one of time, jumps or decisions".into())),
            _ => Err(ConfigError::BadStop("give only one of time, jumps or decisions".into())),
        }
    }
}

/// One simulation experiment. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub window: WindowSpec,
    pub measure: MeasureSpec,
    pub model: Model,
    pub stop: StopSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "one")]
    pub replicas: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub time_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_out: Option<PathBuf>,
}

fn one() -> usize {
    1
}

/// An [`ExperimentConfig`] after validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub window: ConvexPolygon,
    pub measure: LineMeasure,
    pub model: Model,
    pub stop: StopRule,
    pub seed: Option<u64>,
    pub replicas: usize,
    pub time_grid: Vec<f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<Experiment, ConfigError> {
        let window = self.window.resolve()?;
        let measure = self.measure.resolve()?;
        let stop = self.stop.rule()?;
        let allowed = match (self.model, stop) {
            (Model::Stit | Model::Cowan, StopRule::MaxTime(_) | StopRule::MaxJumps(_)) => true,
            (Model::MeckeDiscrete, StopRule::MaxDecisions(_) | StopRule::MaxJumps(_)) => true,
            (Model::MeckeContinuous, StopRule::MaxTime(_)) => true,
            _ => false,
        };
        if !allowed {
            return Err(ConfigError::BadStop(format!(
                "{:?} cannot stop on {stop:?}",
                self.model
            )));
        }
        if self.replicas == 0 {
            return Err(ConfigError::Invalid("replicas must be at least 1".into()));
        }
        if self.time_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(ConfigError::Invalid(format!("bad time grid {:?}", self.time_grid)));
        }
        Ok(Experiment {
            window,
            measure,
            model: self.model,
            stop,
            seed: self.seed,
            replicas: self.replicas,
            time_grid: self.time_grid.clone(),
        })
    }
}

impl Experiment {
    /// Runs replica `replica` on its own random stream.
    pub fn simulate(&self, seed: u64, replica: u64) -> Result<ProcessTrace, ProcessError> {
        let mut rng = rng::stream(seed, SIMULATE_CHANNEL, replica);
        let (w, m) = (&self.window, &self.measure);
        match (self.model, self.stop) {
            (Model::Stit, stop) => stit_simulate(w, m, stop, seed, &mut rng),
            (Model::Cowan, stop) => cowan_simulate(w, m, stop, seed, &mut rng),
            (Model::MeckeDiscrete, stop) => {
                mecke_discrete_simulate(w, m, stop, seed, &mut rng).map(|(_, t)| t)
            }
            (Model::MeckeContinuous, StopRule::MaxTime(t)) => {
                mecke_continuous_simulate(w, m, t, seed, &mut rng).map(|(_, t)| t)
            }
            (Model::MeckeContinuous, stop) => Err(ProcessError::InvalidStop(format!(
                "continuous Mecke process needs a time, got {stop:?}"
            ))),
        }
    }
}

const SIMULATE_CHANNEL: u64 = 0x5349_4d55;
