//! Waveguide outlines: centerline offsetting and surface cavity patterns.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::polyline::{cumulative_arc_length, ClosedPolyline, Point2, Vec2};

/// Rectangular cavity pattern cut into one waveguide surface.
///
/// `spacing` is the gap between adjacent cavities. All lengths in millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub cavity_count: usize,
    pub width: f64,
    pub depth: f64,
    pub spacing: f64,
}

impl PatternSpec {
    pub const fn new(cavity_count: usize, width: f64, depth: f64, spacing: f64) -> Self {
        Self {
            cavity_count,
            width,
            depth,
            spacing,
        }
    }

    /// Total arc length occupied by the cavity group.
    pub fn footprint(&self) -> f64 {
        if self.cavity_count == 0 {
            return 0.0;
        }
        self.cavity_count as f64 * self.width + (self.cavity_count as f64 - 1.0) * self.spacing
    }

    pub fn validate(&self) -> Result<()> {
        if self.cavity_count > 0 && !(self.width > 0.0 && self.depth > 0.0 && self.spacing > 0.0) {
            return Err(Error::InvalidInput(format!(
                "pattern width/depth/spacing must be positive, got ({}, {}, {})",
                self.width, self.depth, self.spacing
            )));
        }
        Ok(())
    }
}

/// Which waveguide surface receives the cavity pattern.
///
/// `Outer` is the convex surface facing away from the twin axis; the choice is
/// recorded in sweep output so runs remain comparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CavitySide {
    #[default]
    Outer,
    Inner,
}

/// Per-vertex offset frame for a centerline: cumulative arc length and unit
/// normals (left perpendicular of the angle-bisector tangent).
pub(crate) struct CenterlineFrame<'a> {
    points: &'a [Point2],
    pub arc: Vec<f64>,
    pub normals: Vec<Vec2>,
}

impl<'a> CenterlineFrame<'a> {
    pub fn new(points: &'a [Point2]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "centerline needs at least 2 points, got {}",
                points.len()
            )));
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0].distance(w[1]) < 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "coincident centerline points at indices {i} and {}",
                    i + 1
                )));
            }
        }
        let n = points.len();
        let arc = cumulative_arc_length(points);
        let mut normals = Vec::with_capacity(n);
        for i in 0..n {
            let tangent = if i == 0 {
                endpoint_tangent(points[0], points[1], points.get(2).copied())
            } else if i == n - 1 {
                endpoint_tangent(
                    points[n - 1],
                    points[n - 2],
                    (n >= 3).then(|| points[n - 3]),
                )
                .scale(-1.0)
            } else {
                let t0 = points[i].sub(points[i - 1]).normalized();
                let t1 = points[i + 1].sub(points[i]).normalized();
                let sum = t0.add(t1);
                if sum.norm() < 1e-12 {
                    return Err(Error::InvalidInput(format!(
                        "centerline reverses direction at index {i}"
                    )));
                }
                sum.normalized()
            };
            normals.push(tangent.perp());
        }
        Ok(Self {
            points,
            arc,
            normals,
        })
    }

    pub fn total(&self) -> f64 {
        *self.arc.last().unwrap()
    }

    /// Position and normal at arc length `s`, linearly interpolated between samples.
    pub fn at(&self, s: f64) -> (Point2, Vec2) {
        let arc = &self.arc;
        let i = match arc.binary_search_by(|a| a.total_cmp(&s)) {
            Ok(i) => i.min(arc.len() - 2),
            Err(i) => i.saturating_sub(1).min(arc.len() - 2),
        };
        let span = arc[i + 1] - arc[i];
        let t = ((s - arc[i]) / span).clamp(0.0, 1.0);
        let p = Point2::new(
            self.points[i].x + t * (self.points[i + 1].x - self.points[i].x),
            self.points[i].z + t * (self.points[i + 1].z - self.points[i].z),
        );
        let n = self.normals[i]
            .scale(1.0 - t)
            .add(self.normals[i + 1].scale(t));
        (p, n.normalized())
    }

    /// Offset every vertex along its normal by signed distance `d`.
    pub fn offset(&self, d: f64) -> Vec<Point2> {
        self.points
            .iter()
            .zip(&self.normals)
            .map(|(p, n)| p.add(n.scale(d)))
            .collect()
    }
}

/// Tangent at an endpoint `p0` looking toward `p1`, using the osculating
/// circle through the first three points when available. This keeps circle
/// offsets exact at the end caps; collinear points fall back to the chord.
fn endpoint_tangent(p0: Point2, p1: Point2, p2: Option<Point2>) -> Vec2 {
    let chord = p1.sub(p0);
    let Some(p2) = p2 else {
        return chord.normalized();
    };
    let d = 2.0 * (p0.x * (p1.z - p2.z) + p1.x * (p2.z - p0.z) + p2.x * (p0.z - p1.z));
    let scale = chord.norm() * p2.sub(p0).norm();
    if d.abs() < 1e-12 * scale.max(1e-12) {
        return chord.normalized();
    }
    let sq = |p: Point2| p.x * p.x + p.z * p.z;
    let ux = (sq(p0) * (p1.z - p2.z) + sq(p1) * (p2.z - p0.z) + sq(p2) * (p0.z - p1.z)) / d;
    let uz = (sq(p0) * (p2.x - p1.x) + sq(p1) * (p0.x - p2.x) + sq(p2) * (p1.x - p0.x)) / d;
    let radial = p0.sub(Point2::new(ux, uz)).normalized();
    let tangent = radial.perp();
    if tangent.dot(chord) >= 0.0 {
        tangent
    } else {
        tangent.scale(-1.0)
    }
}

/// Offset a centerline into a closed waveguide outline of the given thickness.
///
/// The centerline is offset by ±thickness/2 along per-vertex normals and capped
/// with flat end faces. Vertices come out counterclockwise: the −normal side
/// start→end, then the +normal side end→start.
pub fn build_waveguide_outline(centerline: &[Point2], thickness: f64) -> Result<ClosedPolyline> {
    if thickness <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "thickness must be positive, got {thickness}"
        )));
    }
    let frame = CenterlineFrame::new(centerline)?;
    let h = thickness / 2.0;
    let lower = frame.offset(-h);
    let upper = frame.offset(h);

    // A local fold means the offset stepped backwards relative to the
    // centerline: the curvature radius dipped below thickness/2 there.
    for side in [&lower, &upper] {
        for i in 0..side.len() - 1 {
            let ds = side[i + 1].sub(side[i]);
            let dc = centerline[i + 1].sub(centerline[i]);
            if ds.dot(dc) <= 0.0 {
                return Err(Error::SelfIntersectingOffset {
                    start_mm: frame.arc[i],
                    end_mm: frame.arc[i + 1],
                });
            }
        }
    }

    let outline = assemble_outline(lower, upper);
    if let Some((i, j)) = outline.first_crossing() {
        let (lo, hi) = crossing_arc_interval(&frame, centerline.len(), i, j);
        return Err(Error::SelfIntersectingOffset {
            start_mm: lo,
            end_mm: hi,
        });
    }
    Ok(outline)
}

fn assemble_outline(lower: Vec<Point2>, upper: Vec<Point2>) -> ClosedPolyline {
    let mut vertices = lower;
    vertices.extend(upper.into_iter().rev());
    ClosedPolyline::from_vertices(vertices)
}

/// Map a pair of crossing outline edges back onto the centerline arc axis.
fn crossing_arc_interval(
    frame: &CenterlineFrame<'_>,
    n: usize,
    edge_i: usize,
    edge_j: usize,
) -> (f64, f64) {
    let edge_to_s = |e: usize| -> f64 {
        if e < n {
            frame.arc[e.min(n - 1)]
        } else {
            let k = e - n; // upper side is stored reversed
            frame.arc[n - 1 - k.min(n - 1)]
        }
    };
    let (a, b) = (edge_to_s(edge_i), edge_to_s(edge_j));
    (a.min(b), a.max(b))
}

/// Cut the cavity pattern into one surface of an outline built by
/// [`build_waveguide_outline`] from the same centerline.
///
/// The cavity group is centered at the centerline's arc-length midpoint; each
/// cavity contributes two walls along the local surface normal and a straight
/// floor, adding four vertices. A zero-cavity spec returns the outline
/// unchanged.
pub fn carve_pattern(
    outline: &ClosedPolyline,
    centerline: &[Point2],
    spec: &PatternSpec,
    side: CavitySide,
) -> Result<ClosedPolyline> {
    spec.validate()?;
    if spec.cavity_count == 0 {
        return Ok(outline.clone());
    }
    let frame = CenterlineFrame::new(centerline)?;
    let n = centerline.len();
    if outline.len() != 2 * n {
        return Err(Error::InvalidInput(format!(
            "outline has {} vertices, expected {} for a {}-point centerline",
            outline.len(),
            2 * n,
            n
        )));
    }
    // Half-thickness is implicit in the outline: the first lower vertex sits at
    // distance thickness/2 below the first centerline point.
    let h = outline.vertices()[0].distance(centerline[0]);
    if spec.depth >= h {
        return Err(Error::PatternDepth {
            depth_mm: spec.depth,
            half_thickness_mm: h,
        });
    }
    let total = frame.total();
    let footprint = spec.footprint();
    if footprint > total {
        return Err(Error::PatternFootprint {
            footprint_mm: footprint,
            available_mm: total,
        });
    }

    let sign = match side {
        CavitySide::Outer => outer_side_sign(&frame, h),
        CavitySide::Inner => -outer_side_sign(&frame, h),
    };

    let group_start = (total - footprint) / 2.0;
    let pitch = spec.width + spec.spacing;
    let cavities: Vec<(f64, f64)> = (0..spec.cavity_count)
        .map(|k| {
            let s0 = group_start + k as f64 * pitch;
            (s0, s0 + spec.width)
        })
        .collect();

    let surface = carve_side(&frame, h * sign, spec.depth, &cavities);

    let lower_orig = outline.vertices()[..n].to_vec();
    let upper_orig: Vec<Point2> = outline.vertices()[n..].iter().rev().copied().collect();
    let carved = if sign > 0.0 {
        assemble_outline(lower_orig, surface)
    } else {
        assemble_outline(surface, upper_orig)
    };

    if let Some((i, j)) = carved.first_crossing() {
        return Err(Error::InvalidScene(format!(
            "carved outline self-intersects between edges {i} and {j}"
        )));
    }
    Ok(carved)
}

/// +1 when the +normal side is the outer (larger |z|) surface at mid-arc.
fn outer_side_sign(frame: &CenterlineFrame<'_>, h: f64) -> f64 {
    let (p, n) = frame.at(frame.total() / 2.0);
    let plus = p.add(n.scale(h));
    let minus = p.add(n.scale(-h));
    if plus.z.abs() >= minus.z.abs() {
        1.0
    } else {
        -1.0
    }
}

/// Rebuild one offset side with rectangular notches. `offset` is the signed
/// surface offset from the centerline; the floor sits `depth` closer to it.
fn carve_side(
    frame: &CenterlineFrame<'_>,
    offset: f64,
    depth: f64,
    cavities: &[(f64, f64)],
) -> Vec<Point2> {
    let floor = offset - offset.signum() * depth;
    let eps = 1e-9;
    let inside_cavity = |s: f64| cavities.iter().any(|&(a, b)| s > a - eps && s < b + eps);

    let mut out = Vec::with_capacity(frame.points.len() + 4 * cavities.len());
    let mut next_cavity = 0usize;
    for i in 0..frame.points.len() {
        let s = frame.arc[i];
        while next_cavity < cavities.len() && cavities[next_cavity].0 <= s + eps {
            let (s0, s1) = cavities[next_cavity];
            let (p0, n0) = frame.at(s0);
            let (p1, n1) = frame.at(s1);
            out.push(p0.add(n0.scale(offset)));
            out.push(p0.add(n0.scale(floor)));
            out.push(p1.add(n1.scale(floor)));
            out.push(p1.add(n1.scale(offset)));
            next_cavity += 1;
        }
        if !inside_cavity(s) {
            out.push(frame.points[i].add(frame.normals[i].scale(offset)));
        }
    }
    while next_cavity < cavities.len() {
        let (s0, s1) = cavities[next_cavity];
        let (p0, n0) = frame.at(s0);
        let (p1, n1) = frame.at(s1);
        out.push(p0.add(n0.scale(offset)));
        out.push(p0.add(n0.scale(floor)));
        out.push(p1.add(n1.scale(floor)));
        out.push(p1.add(n1.scale(offset)));
        next_cavity += 1;
    }
    out
}
