//! SVG drawings of tessellations: the window outline plus every splitting
//! chord, clipped to the cell it divided.

use std::fmt::Write;

use crate::geometry::{ConvexPolygon, Point};
use crate::processes::{ProcessError, ProcessTrace, Replay};

/// Chords of all jumps up to `at` (a time for timed traces, a decision
/// index for discrete ones; `None` keeps every event).
pub fn chords(trace: &ProcessTrace, at: Option<f64>) -> Result<Vec<(Point, Point)>, ProcessError> {
    let mut replay = Replay::new(&trace.window);
    let mut out = Vec::new();
    for e in &trace.events {
        if let Some(limit) = at {
            let stamp = e.t.or(e.n.map(|n| n as f64)).unwrap_or(f64::INFINITY);
            if stamp > limit {
                break;
            }
        }
        if let Some(c) = replay.apply(e)? {
            out.push(c);
        }
    }
    Ok(out)
}

/// SVG document with the window as a `<polygon>` and one `<line>` per chord.
pub fn render_svg(window: &ConvexPolygon, chords: &[(Point, Point)]) -> String {
    let vs = window.vertices();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for v in vs {
        x0 = x0.min(v.x);
        x1 = x1.max(v.x);
        y0 = y0.min(v.y);
        y1 = y1.max(v.y);
    }
    let span = (x1 - x0).max(y1 - y0);
    let margin = 0.02 * span;
    let stroke = 0.003 * span;
    let mut s = String::new();
    // y axis flipped so the picture has the usual orientation
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" width="600" height="{}">"#,
        x0 - margin,
        -y1 - margin,
        x1 - x0 + 2.0 * margin,
        y1 - y0 + 2.0 * margin,
        (600.0 * (y1 - y0 + 2.0 * margin) / (x1 - x0 + 2.0 * margin)).round()
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke="black" stroke-width="{stroke}">"#);
    let points: Vec<String> = vs.iter().map(|v| format!("{},{}", v.x, v.y)).collect();
    let _ = writeln!(s, r#"<polygon class="window" points="{}"/>"#, points.join(" "));
    for (a, b) in chords {
        let _ = writeln!(
            s,
            r#"<line class="chord" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            a.x, a.y, b.x, b.y
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
