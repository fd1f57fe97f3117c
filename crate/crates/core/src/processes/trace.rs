//! JSON Lines persistence for traces: one header record, then one record per
//! event.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{ModelTag, ProcessError, ProcessTrace, TraceEvent};
use crate::geometry::ConvexPolygon;
use crate::line_measure::LineMeasure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub window: ConvexPolygon,
    pub measure: LineMeasure,
    pub model_tag: ModelTag,
    pub seed: u64,
}

pub fn write_trace_jsonl<W: Write>(trace: &ProcessTrace, mut out: W) -> Result<(), ProcessError> {
    let header = TraceHeader {
        window: trace.window.clone(),
        measure: trace.measure.clone(),
        model_tag: trace.model_tag,
        seed: trace.seed,
    };
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for e in &trace.events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trace_jsonl<R: BufRead>(input: R) -> Result<ProcessTrace, ProcessError> {
    let mut lines = input
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let (_, first) = lines
        .next()
        .ok_or_else(|| ProcessError::MalformedTrace("missing header record".into()))?;
    let header: TraceHeader = serde_json::from_str(&first?)
        .map_err(|e| ProcessError::MalformedTrace(format!("header: {e}")))?;
    let mut trace = ProcessTrace::new(header.window, header.measure, header.model_tag, header.seed);
    for (lineno, line) in lines {
        let event: TraceEvent = serde_json::from_str(&line?)
            .map_err(|e| ProcessError::MalformedTrace(format!("line {}: {e}", lineno + 1)))?;
        if event.t.is_none() && event.n.is_none() {
            return Err(ProcessError::MalformedTrace(format!(
                "line {}: event has neither \"t\" nor \"n\"",
                lineno + 1
            )));
        }
        trace.events.push(event);
    }
    trace.check_order()?;
    Ok(trace)
}
