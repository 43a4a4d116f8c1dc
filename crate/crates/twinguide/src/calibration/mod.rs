//! Per-sensor cubic calibration: voltage as a cubic in tip displacement,
//! bracketed inversion back to displacement, and the quality metrics used to
//! judge a sensor build (sensitivity, hysteresis, SNR, R²).
//!
//! Calibration is per physical unit: cavity printing and emitter seating vary
//! enough between builds that models are never shared across actuators.

mod fit;
mod io;
mod metrics;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use fit::{evaluate, evaluate_checked, fit_calibration, invert, Inversion};
pub use io::{load_samples, write_samples, CALIBRATION_HEADER};
pub use metrics::{metrics, system_sensitivity, Metrics};

/// Loading or unloading half of a pressure cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Loading,
    Unloading,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Loading => write!(f, "loading"),
            Branch::Unloading => write!(f, "unloading"),
        }
    }
}

impl FromStr for Branch {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "loading" => Ok(Branch::Loading),
            "unloading" => Ok(Branch::Unloading),
            other => Err(format!("bad branch '{other}' (expected loading|unloading)")),
        }
    }
}

/// One calibration record: both sensor voltages at a displacement setpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSample {
    pub t_s: f64,
    pub pressure_kpa: f64,
    pub displacement_mm: f64,
    pub v1_mv: f64,
    pub v2_mv: f64,
    pub cycle: u32,
    pub branch: Branch,
}

impl CalibrationSample {
    pub fn voltage(&self, sensor: SensorId) -> f64 {
        match sensor {
            SensorId::One => self.v1_mv,
            SensorId::Two => self.v2_mv,
        }
    }
}

/// Which of the two embedded sensors a model belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SensorId {
    One,
    Two,
}

impl SensorId {
    pub fn index(&self) -> u8 {
        match self {
            SensorId::One => 1,
            SensorId::Two => 2,
        }
    }
}

impl fmt::Display for SensorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl FromStr for SensorId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "1" => Ok(SensorId::One),
            "2" => Ok(SensorId::Two),
            other => Err(format!("bad sensor id '{other}' (expected 1|2)")),
        }
    }
}

/// Cubic voltage↔displacement map for one sensor. Output voltages are
/// millivolts; displacements are millimeters, elongation positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationModel {
    pub sensor: u8,
    /// Ascending degree: v(x) = c0 + c1·x + c2·x² + c3·x³.
    pub coeffs: [f64; 4],
    pub r_squared: f64,
    /// Displacement range observed during calibration.
    pub valid_range: (f64, f64),
    /// Sign-constant derivative over the valid range; inversion requires it.
    pub monotone: bool,
    pub warnings: Vec<String>,
}

impl CalibrationModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> crate::error::Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
