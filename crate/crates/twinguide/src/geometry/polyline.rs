//! Points, segments and closed polylines in the bending plane.
//!
//! All geometry lives in the x–z plane: x runs along the actuator axis,
//! z spans the bending direction. Units are millimeters throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the x–z bending plane, in millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub z: f64,
}

impl Point2 {
    pub const fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.z.is_finite()
    }

    pub fn distance(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.z - other.z)
    }

    /// Mirror across the actuator axis (z → −z).
    pub fn mirrored(&self) -> Point2 {
        Point2::new(self.x, -self.z)
    }
}

/// A 2D vector; shares the point representation.
pub type Vec2 = Point2;

impl Point2 {
    pub fn add(&self, v: Vec2) -> Point2 {
        Point2::new(self.x + v.x, self.z + v.z)
    }

    pub fn sub(&self, other: Point2) -> Vec2 {
        Point2::new(self.x - other.x, self.z - other.z)
    }

    pub fn scale(&self, k: f64) -> Vec2 {
        Point2::new(self.x * k, self.z * k)
    }

    pub fn dot(&self, other: Vec2) -> f64 {
        self.x * other.x + self.z * other.z
    }

    pub fn cross(&self, other: Vec2) -> f64 {
        self.x * other.z - self.z * other.x
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.z)
    }

    pub fn normalized(&self) -> Vec2 {
        let n = self.norm();
        Point2::new(self.x / n, self.z / n)
    }

    /// Left-hand perpendicular (rotate +90° in the x–z plane).
    pub fn perp(&self) -> Vec2 {
        Point2::new(-self.z, self.x)
    }
}

/// A directed line segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        Point2::new((self.a.x + self.b.x) / 2.0, (self.a.z + self.b.z) / 2.0)
    }

    /// Unit normal (left of the a→b direction).
    pub fn normal(&self) -> Vec2 {
        self.b.sub(self.a).perp().normalized()
    }
}

/// Intersection of two segments at interior parameters, used for simplicity checks.
///
/// Returns parameters `(t, u)` on the first and second segment when they cross
/// strictly inside both (endpoints excluded by `eps`).
pub fn segments_cross(s1: &Segment, s2: &Segment, eps: f64) -> Option<(f64, f64)> {
    let d1 = s1.b.sub(s1.a);
    let d2 = s2.b.sub(s2.a);
    let denom = d1.cross(d2);
    if denom.abs() < 1e-15 {
        return None;
    }
    let w = s2.a.sub(s1.a);
    let t = w.cross(d2) / denom;
    let u = w.cross(d1) / denom;
    if t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps {
        Some((t, u))
    } else {
        None
    }
}

/// Intersection of an infinite line (through `p` along unit `dir`) with a segment.
///
/// Returns `(t_line, u_segment)` with `u ∈ [0, 1]`.
pub fn line_segment_intersection(p: Point2, dir: Vec2, seg: &Segment) -> Option<(f64, f64)> {
    let d2 = seg.b.sub(seg.a);
    let denom = dir.cross(d2);
    if denom.abs() < 1e-15 {
        return None;
    }
    let w = seg.a.sub(p);
    let t = w.cross(d2) / denom;
    let u = w.cross(dir) / denom;
    if (0.0..=1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// A closed, simple polyline. The closing edge from the last vertex back to the
/// first is implicit; vertices are stored counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedPolyline {
    vertices: Vec<Point2>,
}

impl ClosedPolyline {
    /// Wrap a vertex list without validation. Use [`ClosedPolyline::validate`]
    /// before handing the polyline to the tracer.
    pub fn from_vertices(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segment(&self, i: usize) -> Segment {
        let j = (i + 1) % self.vertices.len();
        Segment::new(self.vertices[i], self.vertices[j])
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.vertices.len()).map(move |i| self.segment(i))
    }

    /// Total boundary length including the closing edge.
    pub fn perimeter(&self) -> f64 {
        self.segments().map(|s| s.length()).sum()
    }

    /// Twice the signed area; positive for counterclockwise vertex order.
    pub fn signed_area2(&self) -> f64 {
        self.segments().map(|s| s.a.cross(s.b)).sum()
    }

    pub fn bbox(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.z = lo.z.min(p.z);
            hi.x = hi.x.max(p.x);
            hi.z = hi.z.max(p.z);
        }
        (lo, hi)
    }

    /// Even-odd point-in-polygon test via crossing count.
    pub fn contains(&self, p: Point2) -> bool {
        let n = self.vertices.len();
        let mut inside = false;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.z > p.z) != (b.z > p.z) {
                let x_cross = a.x + (p.z - a.z) / (b.z - a.z) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Whether no two non-adjacent edges cross. Uses an x-interval sweep so
    /// carved outlines with hundreds of vertices stay cheap to check.
    pub fn is_simple(&self) -> bool {
        self.first_crossing().is_none()
    }

    /// First pair of crossing edges `(i, j)`, if any.
    pub fn first_crossing(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        if n < 4 {
            return None;
        }
        let segs: Vec<Segment> = self.segments().collect();
        let mut order: Vec<usize> = (0..n).collect();
        let min_x = |s: &Segment| s.a.x.min(s.b.x);
        let max_x = |s: &Segment| s.a.x.max(s.b.x);
        order.sort_by(|&i, &j| min_x(&segs[i]).total_cmp(&min_x(&segs[j])));

        for (k, &i) in order.iter().enumerate() {
            for &j in &order[k + 1..] {
                if min_x(&segs[j]) > max_x(&segs[i]) {
                    break;
                }
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                // Skip adjacent edges (shared vertex), including the wrap pair.
                if hi - lo == 1 || (lo == 0 && hi == n - 1) {
                    continue;
                }
                if segments_cross(&segs[i], &segs[j], 1e-12).is_some() {
                    return Some((lo, hi));
                }
            }
        }
        None
    }

    /// Reject degenerate outlines before they reach the tracer.
    pub fn validate(&self) -> Result<()> {
        if self.vertices.len() < 3 {
            return Err(Error::InvalidScene(format!(
                "closed polyline needs at least 3 vertices, got {}",
                self.vertices.len()
            )));
        }
        if let Some(p) = self.vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidScene(format!(
                "non-finite vertex ({}, {})",
                p.x, p.z
            )));
        }
        if let Some(i) = (0..self.len()).find(|&i| self.segment(i).length() < 1e-12) {
            return Err(Error::InvalidScene(format!(
                "degenerate (zero-length) boundary segment at index {i}"
            )));
        }
        if let Some((i, j)) = self.first_crossing() {
            return Err(Error::InvalidScene(format!(
                "boundary self-intersects between edges {i} and {j}"
            )));
        }
        Ok(())
    }

    pub fn mirrored(&self) -> ClosedPolyline {
        ClosedPolyline::from_vertices(self.vertices.iter().map(|p| p.mirrored()).collect())
    }
}

/// Cumulative arc length of an open polyline, one entry per point.
pub fn cumulative_arc_length(points: &[Point2]) -> Vec<f64> {
    let mut acc = Vec::with_capacity(points.len());
    let mut s = 0.0;
    acc.push(0.0);
    for w in points.windows(2) {
        s += w[0].distance(w[1]);
        acc.push(s);
    }
    acc
}

/// Total arc length of an open polyline.
pub fn polyline_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}
