//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by geometry construction, tracing, fitting and stream replay.
#[derive(Debug, Error)]
pub enum Error {
    /// Offsetting a centerline produced a self-intersecting outline.
    #[error(
        "offset self-intersects between arc lengths {start_mm:.3} mm and {end_mm:.3} mm \
         (curvature radius below half the waveguide thickness)"
    )]
    SelfIntersectingOffset { start_mm: f64, end_mm: f64 },

    /// The requested cavity group does not fit on the centerline.
    #[error("pattern footprint {footprint_mm:.3} mm exceeds available centerline length {available_mm:.3} mm")]
    PatternFootprint {
        footprint_mm: f64,
        available_mm: f64,
    },

    /// Cavities may not cut past the waveguide midline.
    #[error("cavity depth {depth_mm:.3} mm reaches or exceeds the local half-thickness {half_thickness_mm:.3} mm")]
    PatternDepth {
        depth_mm: f64,
        half_thickness_mm: f64,
    },

    /// Twin centerlines do not meet at a shared junction.
    #[error("waveguide centerlines do not meet: endpoint gap {gap_mm:.3} mm exceeds tolerance {tol_mm:.3} mm")]
    JunctionMismatch { gap_mm: f64, tol_mm: f64 },

    /// A scene failed validation before tracing.
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    /// The emitter must sit inside a waveguide core.
    #[error("emitter at ({x:.3}, {z:.3}) mm lies outside every waveguide core")]
    EmitterOutsideCore { x: f64, z: f64 },

    /// Malformed input data, with the 1-based row that caused it.
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// Invalid argument or parameter combination.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A least-squares system without enough independent data.
    #[error("rank-deficient fit: {0}")]
    RankDeficientFit(String),

    /// Inversion requested on a model that is not monotone over its valid range.
    #[error(
        "calibration model is not monotone over [{x_min:.3}, {x_max:.3}] mm; inversion disabled"
    )]
    NonMonotoneModel { x_min: f64, x_max: f64 },

    /// A geometry or trace failure attributed to one deformation state.
    #[error("state '{label}': {source}")]
    State {
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Attach a deformation-state label to an error bubbling out of a per-state step.
    pub fn for_state(self, label: impl Into<String>) -> Self {
        Error::State {
            label: label.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
