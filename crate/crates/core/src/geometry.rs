//! Planar convex polygons and lines in `(theta, p)` form.
//!
//! A line with direction angle `theta ∈ [0, π)` and offset `p` is the set
//! `{x : n(theta) · x = p}` with unit normal `n(theta) = (-sin theta, cos theta)`.
//! Splitting a polygon by a line yields the part on the side of the origin
//! (`positive`) and the part on the far side (`negative`).
//!
//! Degeneracy tests use [`EPS_GEOM`] scaled by the diameter of the polygon
//! being tested.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for vertex hits, zero chords and collinearity.
pub const EPS_GEOM: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex {0} is not finite")]
    NonFinite(usize),
    #[error("polygon is not counter-clockwise convex at vertex {0}")]
    NotConvex(usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("degenerate split: chord length {0:e} below tolerance")]
    DegenerateSplit(f64),
    #[error("line passes through the origin (|p| = {0:e})")]
    LineThroughOrigin(f64),
    #[error("invalid line: theta = {theta}, p = {p}")]
    InvalidLine { theta: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn lerp(self, other: Point, s: f64) -> Point {
        Point::new(
            self.x + s * (other.x - self.x),
            self.y + s * (other.y - self.y),
        )
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// A line `{x : -x sin(theta) + y cos(theta) = p}` with `theta ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub theta: f64,
    pub p: f64,
}

impl Line {
    /// Builds a line, folding `theta` into `[0, π)` (flipping the sign of `p`
    /// when a half-turn is removed) so every line has one representation.
    pub fn new(theta: f64, p: f64) -> Result<Self, GeometryError> {
        if !theta.is_finite() || !p.is_finite() {
            return Err(GeometryError::InvalidLine { theta, p });
        }
        let turns = (theta / PI).floor();
        let mut theta = theta - turns * PI;
        let mut p = if (turns as i64).rem_euclid(2) == 1 { -p } else { p };
        if theta >= PI {
            theta -= PI;
            p = -p;
        }
        if theta < 0.0 {
            theta = 0.0;
        }
        Ok(Self { theta, p })
    }

    /// The vertical line `x = x0`.
    pub fn vertical(x0: f64) -> Self {
        Self {
            theta: PI / 2.0,
            p: -x0,
        }
    }

    /// The horizontal line `y = y0`.
    pub fn horizontal(y0: f64) -> Self {
        Self { theta: 0.0, p: y0 }
    }

    pub fn normal(&self) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (-s, c)
    }

    /// `n · x - p`; its sign tells the side of the line.
    pub fn signed_distance(&self, pt: Point) -> f64 {
        let (nx, ny) = self.normal();
        nx * pt.x + ny * pt.y - self.p
    }

    /// Endpoints of the segment `line ∩ poly`, if the line crosses the interior.
    pub fn clip_to(&self, poly: &ConvexPolygon) -> Option<(Point, Point)> {
        let split = poly.split(self).ok()?;
        split.chord
    }
}

fn projection(theta: f64, pt: Point) -> f64 {
    let (s, c) = theta.sin_cos();
    -s * pt.x + c * pt.y
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolygonSpec {
    vertices: Vec<[f64; 2]>,
}

/// Convex polygon with counter-clockwise vertices and positive area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonSpec", into = "PolygonSpec")]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
    area: f64,
    perimeter: f64,
}

impl TryFrom<PolygonSpec> for ConvexPolygon {
    type Error = GeometryError;

    fn try_from(spec: PolygonSpec) -> Result<Self, Self::Error> {
        ConvexPolygon::new(
            spec.vertices
                .into_iter()
                .map(|[x, y]| Point::new(x, y))
                .collect(),
        )
    }
}

impl From<ConvexPolygon> for PolygonSpec {
    fn from(poly: ConvexPolygon) -> Self {
        PolygonSpec {
            vertices: poly.vertices.iter().map(|v| [v.x, v.y]).collect(),
        }
    }
}

fn shoelace(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    0.5 * twice
}

fn boundary_length(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n).map(|i| vertices[i].dist(vertices[(i + 1) % n])).sum()
}

impl ConvexPolygon {
    /// Validates and builds a polygon from counter-clockwise vertices.
    pub fn new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if let Some(i) = vertices
            .iter()
            .position(|v| !v.x.is_finite() || !v.y.is_finite())
        {
            return Err(GeometryError::NonFinite(i));
        }
        let poly = Self::from_vertices_unchecked(vertices);
        poly.validate()?;
        Ok(poly)
    }

    pub(crate) fn from_vertices_unchecked(vertices: Vec<Point>) -> Self {
        let area = shoelace(&vertices);
        let perimeter = boundary_length(&vertices);
        Self {
            vertices,
            area,
            perimeter,
        }
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, GeometryError> {
        Self::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn unit_square() -> Self {
        Self::rectangle(0.0, 0.0, 1.0, 1.0).expect("unit square is valid")
    }

    /// The triangle `(0,0), (1,0), (0,1)`.
    pub fn unit_triangle() -> Self {
        Self::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ])
        .expect("unit triangle is valid")
    }

    /// Checks orientation, convexity and positive area.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        let scale = self.diameter();
        if !(self.area > 0.0) || self.area <= EPS_GEOM * scale * scale {
            return Err(GeometryError::ZeroArea);
        }
        let tol = EPS_GEOM * scale * scale;
        for i in 0..n {
            let a = self.vertices[(i + n - 1) % n];
            let b = self.vertices[i];
            let c = self.vertices[(i + 1) % n];
            if cross(a, b, c) < -tol {
                return Err(GeometryError::NotConvex(i));
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut best: f64 = 0.0;
        for i in 0..v.len() {
            for j in (i + 1)..v.len() {
                best = best.max(v[i].dist(v[j]));
            }
        }
        best
    }

    /// Range of `n(theta) · x` over the polygon.
    pub fn support_interval(&self, theta: f64) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                let h = projection(theta, v);
                (lo.min(h), hi.max(h))
            })
    }

    /// Width of the polygon measured along the normal of direction `theta`.
    pub fn width(&self, theta: f64) -> f64 {
        let (lo, hi) = self.support_interval(theta);
        hi - lo
    }

    fn tolerance(&self) -> f64 {
        EPS_GEOM * self.diameter()
    }

    /// True iff the line crosses the interior with a chord above tolerance.
    pub fn contains_line_hit(&self, line: &Line) -> bool {
        let (lo, hi) = self.support_interval(line.theta);
        let tol = self.tolerance();
        line.p > lo + tol && line.p < hi - tol
    }

    /// Cuts the polygon along `line`.
    ///
    /// The positive part lies on the side of the origin. A line that misses
    /// the interior leaves the whole polygon on one side and a zero chord.
    pub fn split(&self, line: &Line) -> Result<SplitResult, GeometryError> {
        let tol = self.tolerance();
        let origin_side = -line.p;
        if origin_side.abs() <= EPS_GEOM {
            return Err(GeometryError::LineThroughOrigin(line.p.abs()));
        }
        // orient distances so that positive values are on the origin side
        let sign = origin_side.signum();
        let dist: Vec<f64> = self
            .vertices
            .iter()
            .map(|&v| sign * line.signed_distance(v))
            .collect();

        let max = dist.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = dist.iter().cloned().fold(f64::INFINITY, f64::min);
        if min >= -tol {
            return Ok(SplitResult {
                positive: Some(self.clone()),
                negative: None,
                chord_length: 0.0,
                chord: None,
            });
        }
        if max <= tol {
            return Ok(SplitResult {
                positive: None,
                negative: Some(self.clone()),
                chord_length: 0.0,
                chord: None,
            });
        }

        let n = self.vertices.len();
        let mut pos = Vec::with_capacity(n + 2);
        let mut neg = Vec::with_capacity(n + 2);
        let mut cut_points = Vec::with_capacity(2);
        for i in 0..n {
            let a = self.vertices[i];
            let da = dist[i];
            let b = self.vertices[(i + 1) % n];
            let db = dist[(i + 1) % n];
            if da.abs() <= tol {
                pos.push(a);
                neg.push(a);
                cut_points.push(a);
            } else if da > 0.0 {
                pos.push(a);
            } else {
                neg.push(a);
            }
            if (da > tol && db < -tol) || (da < -tol && db > tol) {
                let q = a.lerp(b, da / (da - db));
                pos.push(q);
                neg.push(q);
                cut_points.push(q);
            }
        }
        let pos = cleanup(pos, tol);
        let neg = cleanup(neg, tol);
        let positive = (pos.len() >= 3).then(|| ConvexPolygon::from_vertices_unchecked(pos));
        let negative = (neg.len() >= 3).then(|| ConvexPolygon::from_vertices_unchecked(neg));
        let (chord_length, chord) = match cut_points.as_slice() {
            [p, q, ..] => (p.dist(*q), Some((*p, *q))),
            _ => (0.0, None),
        };
        match (positive, negative) {
            (Some(positive), Some(negative)) => {
                if chord_length <= tol {
                    return Err(GeometryError::DegenerateSplit(chord_length));
                }
                Ok(SplitResult {
                    positive: Some(positive),
                    negative: Some(negative),
                    chord_length,
                    chord,
                })
            }
            (Some(_), None) => Ok(SplitResult {
                positive: Some(self.clone()),
                negative: None,
                chord_length: 0.0,
                chord: None,
            }),
            (None, Some(_)) => Ok(SplitResult {
                positive: None,
                negative: Some(self.clone()),
                chord_length: 0.0,
                chord: None,
            }),
            (None, None) => Err(GeometryError::DegenerateSplit(chord_length)),
        }
    }
}

/// Drops consecutive vertices closer than `tol`.
fn cleanup(mut pts: Vec<Point>, tol: f64) -> Vec<Point> {
    pts.dedup_by(|b, a| a.dist(*b) <= tol);
    while pts.len() > 1 && pts[0].dist(pts[pts.len() - 1]) <= tol {
        pts.pop();
    }
    pts
}

/// Outcome of [`ConvexPolygon::split`].
#[derive(Debug, Clone, PartialEq)]
pub struct SplitResult {
    /// Part on the origin side of the line.
    pub positive: Option<ConvexPolygon>,
    /// Part on the far side of the line.
    pub negative: Option<ConvexPolygon>,
    pub chord_length: f64,
    /// Endpoints of the chord when both parts are present.
    pub chord: Option<(Point, Point)>,
}

impl SplitResult {
    pub fn is_cut(&self) -> bool {
        self.positive.is_some() && self.negative.is_some()
    }
}
