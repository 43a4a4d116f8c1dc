//! Digital shadow of the sensorized actuator.
//!
//! Voltage frames stream in from the physical unit (file replay or live
//! feed), get ambient-compensated, inverted through the per-sensor
//! calibration models, and drive a displacement estimate plus an
//! interpolated waveguide shape. Each estimate is compared against the
//! pressure-driven nominal model; systematic growth of that deviation flags
//! material drift, and a sagging estimate under steady pressure flags a
//! leak. Information flows strictly from the physical system into the
//! shadow; nothing commands the hardware back.

mod buffer;
mod engine;
mod nominal;
mod replay;

use serde::{Deserialize, Serialize};

pub use buffer::FrameBuffer;
pub use engine::{compensate, Compensated, ShadowConfig, ShadowEngine, ShadowState};
pub use nominal::NominalModel;
pub use replay::{
    load_stream_csv, load_stream_ndjson, replay, write_stream_csv, AlarmEpisode, ReplayOptions,
    ReplaySummary, STREAM_HEADER,
};

/// One raw acquisition frame: active and ambient photodiode readings for
/// both sensors, with the commanded pressure when the rig reports it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorFrame {
    pub t_s: f64,
    pub v1_active_mv: f64,
    pub v1_ambient_mv: f64,
    pub v2_active_mv: f64,
    pub v2_ambient_mv: f64,
    pub pressure_kpa: Option<f64>,
}

/// Diagnostic state of the shadow at one frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alarm {
    #[default]
    None,
    Drift,
    Leak,
    Saturated,
}

impl std::fmt::Display for Alarm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Alarm::None => write!(f, "none"),
            Alarm::Drift => write!(f, "drift"),
            Alarm::Leak => write!(f, "leak"),
            Alarm::Saturated => write!(f, "saturated"),
        }
    }
}
