//! 2D scene construction for twin bend-sensing waveguides.
//!
//! A scene starts from one centerline per waveguide (millimeters, x–z plane),
//! gets offset into a solid outline, optionally receives a rectangular cavity
//! pattern on one surface, and is finished with an emitter and a receiver
//! placed relative to the twin junction points. All operations are pure and
//! safe to call from parallel sweep workers.

mod outline;
mod polyline;
mod scene;
pub mod svg;

pub use outline::{build_waveguide_outline, carve_pattern, CavitySide, PatternSpec};
pub use polyline::{
    cumulative_arc_length, line_segment_intersection, polyline_length, segments_cross,
    ClosedPolyline, Point2, Segment, Vec2,
};
pub use scene::{
    place_optics, EmitterPose, Scene, SceneBuilder, DEFAULT_CORE_INDEX, DEFAULT_EXTERIOR_INDEX,
    DEFAULT_STANDOFF_MM, DEFAULT_THICKNESS_MM, JUNCTION_TOLERANCE_MM,
};
