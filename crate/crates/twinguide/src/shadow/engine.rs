//! The shadow state machine: compensation, inversion, shape lookup,
//! deviation tracking and alarms.

use serde::{Deserialize, Serialize};

use crate::calibration::{evaluate, invert, CalibrationModel};
use crate::deformation::StateLibrary;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::shadow::nominal::NominalModel;
use crate::shadow::{Alarm, SensorFrame};

/// Shadow tuning. The defaults assume 100 Hz streams: the EWMA
/// factor gives a ≈1 s time constant, drift must persist for 5 s, and a leak
/// is a 0.1 mm sag over a 10 s window of steady pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShadowConfig {
    pub ewma_alpha: f64,
    pub drift_threshold_mm: f64,
    pub drift_sustain_s: f64,
    pub leak_window_s: f64,
    pub leak_drop_mm: f64,
    pub leak_pressure_band_kpa: f64,
}

impl Default for ShadowConfig {
    fn default() -> Self {
        Self {
            ewma_alpha: 0.01,
            drift_threshold_mm: 0.5,
            drift_sustain_s: 5.0,
            leak_window_s: 10.0,
            leak_drop_mm: 0.1,
            leak_pressure_band_kpa: 1.0,
        }
    }
}

/// Ambient-compensated voltages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compensated {
    pub v1_mv: f64,
    pub v2_mv: f64,
    /// An ambient reading exceeded its active reading; the difference was
    /// clamped to zero.
    pub clamped: bool,
}

/// Subtract the ambient reading captured while each emitter was dark.
/// Negative results clamp to zero and flag the frame.
pub fn compensate(frame: &SensorFrame) -> Compensated {
    let raw1 = frame.v1_active_mv - frame.v1_ambient_mv;
    let raw2 = frame.v2_active_mv - frame.v2_ambient_mv;
    Compensated {
        v1_mv: raw1.max(0.0),
        v2_mv: raw2.max(0.0),
        clamped: raw1 < 0.0 || raw2 < 0.0,
    }
}

/// Estimated actuator state at one frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowState {
    pub t_s: f64,
    pub displacement_1_mm: f64,
    pub saturated_1: bool,
    pub displacement_2_mm: f64,
    pub saturated_2: bool,
    /// Mean of the unsaturated per-sensor estimates; holds its last value
    /// when both sensors saturate.
    pub fused_mm: f64,
    /// Interpolated tracked points for both waveguides.
    pub shape: [Vec<Point2>; 2],
    /// fused − nominal(pressure); absent when the frame carries no pressure.
    pub deviation_mm: Option<f64>,
    pub deviation_ewma_mm: f64,
    pub alarm: Alarm,
    pub compensation_clamped: bool,
}

/// Replay-deterministic shadow engine: the state after `n` frames depends
/// only on the frames, never on wall time or thread scheduling.
#[derive(Debug, Clone)]
pub struct ShadowEngine {
    model_1: CalibrationModel,
    model_2: CalibrationModel,
    nominal: NominalModel,
    library: StateLibrary,
    config: ShadowConfig,
    ewma: Option<f64>,
    drift_above_since: Option<f64>,
    leak_anchor: Option<LeakAnchor>,
    last_fused: Option<f64>,
    last_shape: Option<[Vec<Point2>; 2]>,
}

#[derive(Debug, Clone, Copy)]
struct LeakAnchor {
    t_s: f64,
    ewma_mm: f64,
    pressure_kpa: f64,
}

impl ShadowEngine {
    pub fn new(
        model_1: CalibrationModel,
        model_2: CalibrationModel,
        nominal: NominalModel,
        library: StateLibrary,
        config: ShadowConfig,
    ) -> Result<Self> {
        for (model, id) in [(&model_1, 1), (&model_2, 2)] {
            if !model.monotone {
                return Err(Error::InvalidInput(format!(
                    "sensor {id} model is not monotone; the shadow cannot invert it"
                )));
            }
        }
        // Shape interpolation blends tracked points pairwise, so every state
        // must carry the same point count per waveguide.
        let counts = [
            library.states()[0].waveguides[0].len(),
            library.states()[0].waveguides[1].len(),
        ];
        for s in library.states() {
            for (w, expected) in counts.iter().enumerate() {
                if s.waveguides[w].len() != *expected {
                    return Err(Error::InvalidInput(format!(
                        "state '{}' waveguide {} has {} points, expected {expected}",
                        s.label,
                        w + 1,
                        s.waveguides[w].len(),
                    )));
                }
            }
        }
        if !(config.ewma_alpha > 0.0 && config.ewma_alpha <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "ewma_alpha must be in (0, 1], got {}",
                config.ewma_alpha
            )));
        }
        Ok(Self {
            model_1,
            model_2,
            nominal,
            library,
            config,
            ewma: None,
            drift_above_since: None,
            leak_anchor: None,
            last_fused: None,
            last_shape: None,
        })
    }

    pub fn config(&self) -> &ShadowConfig {
        &self.config
    }

    /// Drop accumulated history; the next frame starts a fresh episode.
    pub fn reset(&mut self) {
        self.ewma = None;
        self.drift_above_since = None;
        self.leak_anchor = None;
        self.last_fused = None;
        self.last_shape = None;
    }

    /// Advance the shadow by one frame.
    pub fn step(&mut self, frame: &SensorFrame) -> ShadowState {
        let comp = compensate(frame);
        // Construction guarantees monotone models, so inversion cannot fail.
        let inv1 = invert(&self.model_1, comp.v1_mv).expect("monotone model");
        let inv2 = invert(&self.model_2, comp.v2_mv).expect("monotone model");

        let both_saturated = inv1.saturated && inv2.saturated;
        let fused = match (inv1.saturated, inv2.saturated) {
            (false, false) => 0.5 * (inv1.displacement_mm + inv2.displacement_mm),
            (false, true) => inv1.displacement_mm,
            (true, false) => inv2.displacement_mm,
            (true, true) => self
                .last_fused
                .unwrap_or(0.5 * (inv1.displacement_mm + inv2.displacement_mm)),
        };

        let shape = if both_saturated {
            self.last_shape
                .clone()
                .unwrap_or_else(|| self.shape_at(fused))
        } else {
            self.shape_at(fused)
        };

        let deviation = frame
            .pressure_kpa
            .map(|p| fused - self.nominal.displacement_at(p));
        if let Some(dev) = deviation {
            let alpha = self.config.ewma_alpha;
            self.ewma = Some(match self.ewma {
                None => dev,
                Some(prev) => alpha * dev + (1.0 - alpha) * prev,
            });
        }
        let ewma = self.ewma.unwrap_or(0.0);

        // Drift: the smoothed deviation must stay beyond the threshold for
        // the full sustain interval.
        let drift_active = if ewma.abs() > self.config.drift_threshold_mm {
            let since = *self.drift_above_since.get_or_insert(frame.t_s);
            frame.t_s - since >= self.config.drift_sustain_s
        } else {
            self.drift_above_since = None;
            false
        };

        // Leak: smoothed deviation sagging while pressure holds steady.
        let leak_active = match frame.pressure_kpa {
            None => {
                self.leak_anchor = None;
                false
            }
            Some(p) => {
                let re_anchor = match self.leak_anchor {
                    None => true,
                    Some(a) => (p - a.pressure_kpa).abs() > self.config.leak_pressure_band_kpa,
                };
                if re_anchor {
                    self.leak_anchor = Some(LeakAnchor {
                        t_s: frame.t_s,
                        ewma_mm: ewma,
                        pressure_kpa: p,
                    });
                    false
                } else {
                    let a = self.leak_anchor.unwrap();
                    frame.t_s - a.t_s >= self.config.leak_window_s
                        && ewma - a.ewma_mm <= -self.config.leak_drop_mm
                }
            }
        };

        let alarm = if both_saturated {
            Alarm::Saturated
        } else if leak_active {
            Alarm::Leak
        } else if drift_active {
            Alarm::Drift
        } else {
            Alarm::None
        };

        self.last_fused = Some(fused);
        self.last_shape = Some(shape.clone());

        ShadowState {
            t_s: frame.t_s,
            displacement_1_mm: inv1.displacement_mm,
            saturated_1: inv1.saturated,
            displacement_2_mm: inv2.displacement_mm,
            saturated_2: inv2.saturated,
            fused_mm: fused,
            shape,
            deviation_mm: deviation,
            deviation_ewma_mm: ewma,
            alarm,
            compensation_clamped: comp.clamped,
        }
    }

    /// Linear blend of the two library states bracketing a displacement.
    fn shape_at(&self, fused_mm: f64) -> [Vec<Point2>; 2] {
        let (a, b, w) = self.library.bracket(fused_mm);
        let blend = |pa: &[Point2], pb: &[Point2]| -> Vec<Point2> {
            pa.iter()
                .zip(pb)
                .map(|(p, q)| Point2::new(p.x + w * (q.x - p.x), p.z + w * (q.z - p.z)))
                .collect()
        };
        [
            blend(&a.waveguides[0], &b.waveguides[0]),
            blend(&a.waveguides[1], &b.waveguides[1]),
        ]
    }

    /// Voltage pair a healthy unit would report at a displacement; the
    /// self-consistency fixtures lean on this.
    pub fn expected_voltages(&self, displacement_mm: f64) -> (f64, f64) {
        (
            evaluate(&self.model_1, displacement_mm),
            evaluate(&self.model_2, displacement_mm),
        )
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::calibration::{fit_calibration, Branch, CalibrationSample, SensorId};
    use crate::deformation::{synthesize_states, SynthSpec};

    pub(crate) fn linear_models() -> (CalibrationModel, CalibrationModel) {
        let mk = |slope: f64, offset: f64| {
            let samples: Vec<CalibrationSample> = (0..=20)
                .map(|i| {
                    let x = -5.0 + 10.0 * i as f64 / 20.0;
                    CalibrationSample {
                        t_s: i as f64,
                        pressure_kpa: x * 10.0,
                        displacement_mm: x,
                        v1_mv: offset + slope * x,
                        v2_mv: offset + slope * x,
                        cycle: 1,
                        branch: Branch::Loading,
                    }
                })
                .collect();
            fit_calibration(&samples, SensorId::One).unwrap()
        };
        (mk(40.0, 1650.0), mk(30.0, 1620.0))
    }

    pub(crate) fn test_engine(config: ShadowConfig) -> ShadowEngine {
        let (m1, m2) = linear_models();
        let nominal =
            NominalModel::from_table(vec![(-50.0, -5.0), (0.0, 0.0), (50.0, 5.0)]).unwrap();
        let library = synthesize_states(&SynthSpec::default()).unwrap();
        ShadowEngine::new(m1, m2, nominal, library, config).unwrap()
    }

    fn frame_at(engine: &ShadowEngine, t: f64, d: f64, pressure: Option<f64>) -> SensorFrame {
        let (v1, v2) = engine.expected_voltages(d);
        SensorFrame {
            t_s: t,
            v1_active_mv: v1 + 50.0,
            v1_ambient_mv: 50.0,
            v2_active_mv: v2 + 50.0,
            v2_ambient_mv: 50.0,
            pressure_kpa: pressure,
        }
    }

    #[test]
    fn compensation_examples() {
        let f = SensorFrame {
            t_s: 0.0,
            v1_active_mv: 1700.0,
            v1_ambient_mv: 48.0,
            v2_active_mv: 1700.0,
            v2_ambient_mv: 0.0,
            pressure_kpa: None,
        };
        let c = compensate(&f);
        assert_eq!(c.v1_mv, 1652.0);
        assert_eq!(c.v2_mv, 1700.0); // zero ambient passes through
        assert!(!c.clamped);

        let dark = SensorFrame {
            v1_active_mv: 10.0,
            v1_ambient_mv: 60.0,
            ..f
        };
        let c = compensate(&dark);
        assert_eq!(c.v1_mv, 0.0);
        assert!(c.clamped);
    }

    #[test]
    fn knot_displacement_reproduces_library_shape() {
        let mut engine = test_engine(ShadowConfig::default());
        let knot = engine.library.states()[9].clone();
        let d = knot.tip_displacement_mm;
        let state = engine.step(&frame_at(&engine.clone(), 0.0, d, None));
        assert!((state.fused_mm - d).abs() < 1e-6);
        for w in 0..2 {
            for (a, b) in state.shape[w].iter().zip(&knot.waveguides[w]) {
                assert!(
                    a.distance(*b) < 1e-5,
                    "shape point off by {}",
                    a.distance(*b)
                );
            }
        }
    }

    #[test]
    fn matching_nominal_gives_zero_deviation() {
        let mut engine = test_engine(ShadowConfig::default());
        let snapshot = engine.clone();
        // Nominal maps 20 kPa → 2 mm; feed exactly that displacement.
        let state = engine.step(&frame_at(&snapshot, 0.0, 2.0, Some(20.0)));
        assert!(state.deviation_mm.unwrap().abs() < 1e-6);
        assert_eq!(state.alarm, Alarm::None);
    }

    #[test]
    fn ramp_raises_drift_at_predicted_frame() {
        // +0.5 mV/s on both sensors at constant pressure. The test recomputes
        // the alarm frame with the closed-form EWMA ramp response, entirely
        // outside the engine.
        let config = ShadowConfig::default();
        let mut engine = test_engine(config);
        let snapshot = engine.clone();
        let dt = 0.01; // 100 Hz
        let slope_1 = 0.5 / 40.0; // mm/s seen by sensor 1
        let slope_2 = 0.5 / 30.0;
        let ramp_mm_per_s = 0.5 * (slope_1 + slope_2);

        let mut alarm_frame = None;
        for n in 0..30_000usize {
            let t = n as f64 * dt;
            let (v1, v2) = snapshot.expected_voltages(0.0);
            let f = SensorFrame {
                t_s: t,
                v1_active_mv: v1 + 0.5 * t,
                v1_ambient_mv: 0.0,
                v2_active_mv: v2 + 0.5 * t,
                v2_ambient_mv: 0.0,
                pressure_kpa: Some(0.0),
            };
            let s = engine.step(&f);
            if s.alarm == Alarm::Drift {
                alarm_frame = Some(n);
                break;
            }
        }
        let alarm_frame = alarm_frame.expect("ramp must raise drift");

        // Closed form: ewma_n = r·dt·(n − q·(1 − qⁿ)/α) with q = 1 − α is the
        // EWMA of the sampled ramp r·dt·k. First n with |ewma| > threshold,
        // plus the sustain interval, gives the expected alarm frame.
        let alpha = config.ewma_alpha;
        let q = 1.0 - alpha;
        let mut crossing = 0usize;
        for n in 0..30_000usize {
            let ewma = ramp_mm_per_s * dt * (n as f64 - q * (1.0 - q.powi(n as i32)) / alpha);
            if ewma > config.drift_threshold_mm {
                crossing = n;
                break;
            }
        }
        let expected = crossing + (config.drift_sustain_s / dt) as usize;
        let tolerance = (expected as f64 * 0.10) as usize;
        assert!(
            alarm_frame.abs_diff(expected) <= tolerance,
            "alarm at {alarm_frame}, expected {expected} ± {tolerance}"
        );
    }

    #[test]
    fn both_sensors_saturated_holds_shape() {
        let mut engine = test_engine(ShadowConfig::default());
        let snapshot = engine.clone();
        let normal = engine.step(&frame_at(&snapshot, 0.0, 1.0, None));
        let blackout = SensorFrame {
            t_s: 0.01,
            v1_active_mv: 0.0,
            v1_ambient_mv: 0.0,
            v2_active_mv: 0.0,
            v2_ambient_mv: 0.0,
            pressure_kpa: None,
        };
        let held = engine.step(&blackout);
        assert_eq!(held.alarm, Alarm::Saturated);
        assert!(held.saturated_1 && held.saturated_2);
        assert_eq!(held.fused_mm, normal.fused_mm);
        assert_eq!(held.shape, normal.shape);
        // Estimates stay inside the calibrated range even while saturated.
        assert!(held.displacement_1_mm >= -5.0 && held.displacement_1_mm <= 5.0);
    }

    #[test]
    fn ewma_stays_within_input_bounds() {
        let mut engine = test_engine(ShadowConfig::default());
        let snapshot = engine.clone();
        let devs = [0.4, -0.2, 0.1, 0.3, -0.4, 0.0, 0.2];
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (n, &d) in devs.iter().enumerate() {
            lo = lo.min(d);
            hi = hi.max(d);
            // 0 kPa nominal is 0 mm, so the deviation equals the displacement.
            let s = engine.step(&frame_at(&snapshot, n as f64 * 0.01, d, Some(0.0)));
            assert!(
                s.deviation_ewma_mm >= lo - 1e-12 && s.deviation_ewma_mm <= hi + 1e-12,
                "ewma {} outside [{lo}, {hi}]",
                s.deviation_ewma_mm
            );
        }
    }

    #[test]
    fn shape_interpolation_is_continuous() {
        let mut engine = test_engine(ShadowConfig::default());
        let snapshot = engine.clone();
        let (lo, hi) = engine.library.tip_range();
        let mut prev: Option<[Vec<Point2>; 2]> = None;
        let steps = 200;
        for n in 0..=steps {
            let d = lo + (hi - lo) * n as f64 / steps as f64;
            let s = engine.step(&frame_at(&snapshot, n as f64 * 0.01, d, None));
            if let Some(p) = prev {
                let jump = p[0]
                    .iter()
                    .zip(&s.shape[0])
                    .map(|(a, b)| a.distance(*b))
                    .fold(0.0, f64::max);
                // Bounded by the library spacing times the step fraction.
                assert!(jump < 1.0, "shape jump {jump}");
            }
            prev = Some(s.shape.clone());
        }
    }
}
