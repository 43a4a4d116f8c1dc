//! Optical scenes: waveguide outlines plus emitter and receiver placement.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::outline::{build_waveguide_outline, carve_pattern, CavitySide, PatternSpec};
use crate::geometry::polyline::{line_segment_intersection, ClosedPolyline, Point2, Segment, Vec2};

/// Twin centerlines are considered joined when their endpoints are closer
/// than half the 0.5 mm tracked-point sampling interval.
pub const JUNCTION_TOLERANCE_MM: f64 = 0.25;

/// Default waveguide thickness in millimeters. The cross-section is a free
/// design parameter; 3 mm leaves margin for the deepest 1 mm sweep cavity.
pub const DEFAULT_THICKNESS_MM: f64 = 3.0;

/// Default emitter/receiver standoff from the junction points.
pub const DEFAULT_STANDOFF_MM: f64 = 3.0;

/// Core refractive index for a soft elastomer at 860 nm.
pub const DEFAULT_CORE_INDEX: f64 = 1.43;

/// Exterior and cavity medium (air).
pub const DEFAULT_EXTERIOR_INDEX: f64 = 1.0;

/// Point source pose: origin plus a unit axis direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterPose {
    pub origin: Point2,
    pub direction: Vec2,
}

impl EmitterPose {
    pub fn new(origin: Point2, direction: Vec2) -> Self {
        Self {
            origin,
            direction: direction.normalized(),
        }
    }

    pub fn mirrored(&self) -> Self {
        Self {
            origin: self.origin.mirrored(),
            direction: self.direction.mirrored(),
        }
    }
}

/// A complete 2D optical scene: one or two closed waveguide outlines, an
/// emitter, a receiver segment and the refractive index pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub waveguides: Vec<ClosedPolyline>,
    pub emitter: EmitterPose,
    pub receiver: Segment,
    pub core_index: f64,
    pub exterior_index: f64,
}

impl Scene {
    pub fn validate(&self) -> Result<()> {
        if self.waveguides.is_empty() || self.waveguides.len() > 2 {
            return Err(Error::InvalidScene(format!(
                "expected 1 or 2 waveguide outlines, got {}",
                self.waveguides.len()
            )));
        }
        for w in &self.waveguides {
            w.validate()?;
        }
        if !(self.core_index > self.exterior_index && self.exterior_index > 0.0) {
            return Err(Error::InvalidScene(format!(
                "guiding requires core index > exterior index > 0, got {} vs {}",
                self.core_index, self.exterior_index
            )));
        }
        if !self.emitter.origin.is_finite() || !self.emitter.direction.is_finite() {
            return Err(Error::InvalidScene("non-finite emitter pose".into()));
        }
        if !self.receiver.a.is_finite() || !self.receiver.b.is_finite() {
            return Err(Error::InvalidScene("non-finite receiver segment".into()));
        }
        Ok(())
    }

    /// Whether a point sits inside any waveguide core.
    pub fn in_core(&self, p: Point2) -> bool {
        self.waveguides.iter().any(|w| w.contains(p))
    }

    /// Scene bounding box with a one-thickness margin on every side.
    pub fn bbox(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for w in &self.waveguides {
            let (l, h) = w.bbox();
            lo.x = lo.x.min(l.x);
            lo.z = lo.z.min(l.z);
            hi.x = hi.x.max(h.x);
            hi.z = hi.z.max(h.z);
        }
        for p in [self.receiver.a, self.receiver.b, self.emitter.origin] {
            lo.x = lo.x.min(p.x);
            lo.z = lo.z.min(p.z);
            hi.x = hi.x.max(p.x);
            hi.z = hi.z.max(p.z);
        }
        let margin = 3.0;
        (
            Point2::new(lo.x - margin, lo.z - margin),
            Point2::new(hi.x + margin, hi.z + margin),
        )
    }

    pub fn mirrored(&self) -> Scene {
        Scene {
            waveguides: self.waveguides.iter().map(|w| w.mirrored()).collect(),
            emitter: self.emitter.mirrored(),
            receiver: Segment::new(self.receiver.a.mirrored(), self.receiver.b.mirrored()),
            core_index: self.core_index,
            exterior_index: self.exterior_index,
        }
    }

    /// Deterministic JSON document (boundary vertex arrays in millimeters,
    /// emitter pose, receiver endpoints, refractive indices).
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    /// SHA-256 over the compact JSON form, for provenance stamps.
    pub fn content_hash(&self) -> String {
        let compact = serde_json::to_string(self).expect("scene serializes");
        let digest = Sha256::digest(compact.as_bytes());
        hex_string(&digest)
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Place the emitter and receiver for a twin-waveguide scene.
///
/// The emitter sits on the junction axis `standoff` millimeters inside the
/// entry junction, aimed along the axis; the receiver spans the exit faces of
/// both waveguides `standoff` millimeters before the opposite junction.
pub fn place_optics(
    outlines: (&ClosedPolyline, &ClosedPolyline),
    centerlines: (&[Point2], &[Point2]),
    standoff: f64,
) -> Result<(EmitterPose, Segment)> {
    if standoff < 0.0 {
        return Err(Error::InvalidInput(format!(
            "standoff must be non-negative, got {standoff}"
        )));
    }
    let (c1, c2) = centerlines;
    if c1.len() < 2 || c2.len() < 2 {
        return Err(Error::InvalidInput(
            "centerlines need at least 2 points".into(),
        ));
    }
    let entry = join_point(c1[0], c2[0])?;
    let exit = join_point(*c1.last().unwrap(), *c2.last().unwrap())?;
    let axis = exit.sub(entry).normalized();

    let emitter = EmitterPose::new(entry.add(axis.scale(standoff)), axis);
    let receiver = receiver_span(
        exit.add(axis.scale(-standoff)),
        axis,
        &[outlines.0, outlines.1],
    )?;
    Ok((emitter, receiver))
}

fn join_point(a: Point2, b: Point2) -> Result<Point2> {
    let gap = a.distance(b);
    if gap > JUNCTION_TOLERANCE_MM {
        return Err(Error::JunctionMismatch {
            gap_mm: gap,
            tol_mm: JUNCTION_TOLERANCE_MM,
        });
    }
    Ok(Point2::new((a.x + b.x) / 2.0, (a.z + b.z) / 2.0))
}

/// Span of the line through `center` perpendicular to `axis` across every
/// outline it crosses.
fn receiver_span(center: Point2, axis: Vec2, outlines: &[&ClosedPolyline]) -> Result<Segment> {
    let perp = axis.perp();
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    for outline in outlines {
        for seg in outline.segments() {
            if let Some((t, _)) = line_segment_intersection(center, perp, &seg) {
                t_min = t_min.min(t);
                t_max = t_max.max(t);
            }
        }
    }
    if t_min > t_max {
        return Err(Error::InvalidScene(
            "receiver line does not cross any waveguide outline".into(),
        ));
    }
    Ok(Segment::new(
        center.add(perp.scale(t_min)),
        center.add(perp.scale(t_max)),
    ))
}

/// Assembles scenes from centerlines: offsets, carving, optics placement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SceneBuilder {
    pub thickness: f64,
    pub standoff: f64,
    pub core_index: f64,
    pub exterior_index: f64,
    pub cavity_side: CavitySide,
}

impl Default for SceneBuilder {
    fn default() -> Self {
        Self {
            thickness: DEFAULT_THICKNESS_MM,
            standoff: DEFAULT_STANDOFF_MM,
            core_index: DEFAULT_CORE_INDEX,
            exterior_index: DEFAULT_EXTERIOR_INDEX,
            cavity_side: CavitySide::Outer,
        }
    }
}

impl SceneBuilder {
    /// Build a twin-waveguide scene from a pair of joined centerlines.
    pub fn build_twin(
        &self,
        centerline_1: &[Point2],
        centerline_2: &[Point2],
        pattern: &PatternSpec,
    ) -> Result<Scene> {
        let o1 = build_waveguide_outline(centerline_1, self.thickness)?;
        let o2 = build_waveguide_outline(centerline_2, self.thickness)?;
        let c1 = carve_pattern(&o1, centerline_1, pattern, self.cavity_side)?;
        let c2 = carve_pattern(&o2, centerline_2, pattern, self.cavity_side)?;
        let (emitter, receiver) =
            place_optics((&c1, &c2), (centerline_1, centerline_2), self.standoff)?;
        let scene = Scene {
            waveguides: vec![c1, c2],
            emitter,
            receiver,
            core_index: self.core_index,
            exterior_index: self.exterior_index,
        };
        scene.validate()?;
        Ok(scene)
    }

    /// Build a single-waveguide scene; emitter and receiver sit `standoff`
    /// inside each end along the chord direction.
    pub fn build_single(&self, centerline: &[Point2], pattern: &PatternSpec) -> Result<Scene> {
        let outline = build_waveguide_outline(centerline, self.thickness)?;
        let carved = carve_pattern(&outline, centerline, pattern, self.cavity_side)?;
        let first = centerline[0];
        let last = *centerline.last().unwrap();
        let axis = last.sub(first).normalized();
        let emitter = EmitterPose::new(first.add(axis.scale(self.standoff)), axis);
        let receiver = receiver_span(last.add(axis.scale(-self.standoff)), axis, &[&carved])?;
        let scene = Scene {
            waveguides: vec![carved],
            emitter,
            receiver,
            core_index: self.core_index,
            exterior_index: self.exterior_index,
        };
        scene.validate()?;
        Ok(scene)
    }
}
