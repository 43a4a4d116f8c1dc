//! Deformation states of the twin waveguides: ingestion, reconstruction and
//! synthetic generation.
//!
//! A deformation state captures both waveguide centerlines at one actuation
//! level, tagged with pressure and the measured tip displacement. Libraries
//! span the actuation range from maximum compression to maximum elongation;
//! the standard protocol uses fifteen states.

mod io;
mod spline;
mod synth;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;

pub use io::{load_states, write_states};
pub use spline::{interpolate_centerline, resample, CubicSpline1, CurveSpline};
pub use synth::{synthesize_states, SynthSpec};

/// Default tracked-point sampling interval along each centerline.
pub const DEFAULT_SAMPLE_INTERVAL_MM: f64 = 0.5;

/// Minimum tracked points per waveguide in a deformation state.
pub const MIN_POINTS_PER_WAVEGUIDE: usize = 7;

/// Position of a state in the actuation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateLabel {
    /// `k` steps below rest; `Compression(1)` is the mildest compression.
    Compression(u32),
    Rest,
    /// `k` steps above rest.
    Elongation(u32),
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateLabel::Compression(k) => write!(f, "compression_{k}"),
            StateLabel::Rest => write!(f, "rest"),
            StateLabel::Elongation(k) => write!(f, "elongation_{k}"),
        }
    }
}

impl FromStr for StateLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "rest" {
            return Ok(StateLabel::Rest);
        }
        let parse_step = |rest: &str| -> std::result::Result<u32, String> {
            rest.parse::<u32>()
                .map_err(|_| format!("bad state label '{s}'"))
                .and_then(|k| {
                    if k == 0 {
                        Err(format!("state label step must be >= 1 in '{s}'"))
                    } else {
                        Ok(k)
                    }
                })
        };
        if let Some(rest) = s.strip_prefix("compression_") {
            return Ok(StateLabel::Compression(parse_step(rest)?));
        }
        if let Some(rest) = s.strip_prefix("elongation_") {
            return Ok(StateLabel::Elongation(parse_step(rest)?));
        }
        Err(format!("bad state label '{s}'"))
    }
}

impl StateLabel {
    /// Protocol ordering key: compression first, elongation last.
    pub fn order_key(&self) -> i64 {
        match self {
            StateLabel::Compression(k) => -(*k as i64),
            StateLabel::Rest => 0,
            StateLabel::Elongation(k) => *k as i64,
        }
    }
}

/// Both waveguide centerlines at one actuation level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationState {
    pub label: StateLabel,
    pub pressure_kpa: f64,
    /// Tracked points per waveguide, ordered by increasing x.
    pub waveguides: [Vec<Point2>; 2],
    /// Signed tip displacement; negative under compression.
    pub tip_displacement_mm: f64,
}

impl DeformationState {
    /// Centerlines densified for scene construction: the raw tracked points
    /// are interpolated so neighboring samples sit about `interval_mm` apart
    /// in arc length. Already-dense states pass through unchanged.
    pub fn dense_centerlines(&self, interval_mm: f64) -> Result<[Vec<Point2>; 2]> {
        let mut out: [Vec<Point2>; 2] = [Vec::new(), Vec::new()];
        for (w, points) in self.waveguides.iter().enumerate() {
            let chord_total: f64 = points.windows(2).map(|p| p[0].distance(p[1])).sum();
            let n_out = ((chord_total / interval_mm).ceil() as usize + 1).max(points.len());
            out[w] = spline::interpolate_centerline(points, n_out)?;
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        for (w, points) in self.waveguides.iter().enumerate() {
            if points.len() < MIN_POINTS_PER_WAVEGUIDE {
                return Err(Error::InvalidInput(format!(
                    "state '{}' waveguide {} has {} points, need at least {}",
                    self.label,
                    w + 1,
                    points.len(),
                    MIN_POINTS_PER_WAVEGUIDE
                )));
            }
            for (i, pair) in points.windows(2).enumerate() {
                if pair[1].x <= pair[0].x {
                    return Err(Error::InvalidInput(format!(
                        "state '{}' waveguide {} x must increase (violated at point {})",
                        self.label,
                        w + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// An ordered set of deformation states, maximum compression first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateLibrary {
    states: Vec<DeformationState>,
    pub sample_interval_mm: f64,
}

impl StateLibrary {
    /// Validate and order states by tip displacement.
    pub fn new(mut states: Vec<DeformationState>, sample_interval_mm: f64) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidInput("state library is empty".into()));
        }
        for s in &states {
            s.validate()?;
        }
        states.sort_by(|a, b| a.tip_displacement_mm.total_cmp(&b.tip_displacement_mm));
        for pair in states.windows(2) {
            if pair[1].tip_displacement_mm <= pair[0].tip_displacement_mm {
                return Err(Error::InvalidInput(format!(
                    "tip displacement must be strictly increasing across states \
                     ('{}' and '{}' collide at {})",
                    pair[0].label, pair[1].label, pair[0].tip_displacement_mm
                )));
            }
            if pair[1].label.order_key() <= pair[0].label.order_key() {
                return Err(Error::InvalidInput(format!(
                    "state labels out of protocol order: '{}' then '{}'",
                    pair[0].label, pair[1].label
                )));
            }
        }
        Ok(Self {
            states,
            sample_interval_mm,
        })
    }

    pub fn states(&self) -> &[DeformationState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, label: StateLabel) -> Option<&DeformationState> {
        self.states.iter().find(|s| s.label == label)
    }

    /// Displacement range spanned by the library.
    pub fn tip_range(&self) -> (f64, f64) {
        (
            self.states.first().unwrap().tip_displacement_mm,
            self.states.last().unwrap().tip_displacement_mm,
        )
    }

    /// The two states bracketing a displacement, with the interpolation
    /// weight of the second. Clamps outside the library range.
    pub fn bracket(&self, tip_mm: f64) -> (&DeformationState, &DeformationState, f64) {
        let first = self.states.first().unwrap();
        let last = self.states.last().unwrap();
        if tip_mm <= first.tip_displacement_mm {
            return (first, first, 0.0);
        }
        if tip_mm >= last.tip_displacement_mm {
            return (last, last, 0.0);
        }
        let hi = self
            .states
            .partition_point(|s| s.tip_displacement_mm < tip_mm)
            .min(self.states.len() - 1);
        let lo = hi - 1;
        let a = &self.states[lo];
        let b = &self.states[hi];
        let w = (tip_mm - a.tip_displacement_mm) / (b.tip_displacement_mm - a.tip_displacement_mm);
        (a, b, w)
    }
}
