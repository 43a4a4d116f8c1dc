//! Shared fixtures for CLI and acceptance tests.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Mutex;

/// Wall-clock-sensitive tests serialize on this gate so a concurrently
/// running sweep cannot starve a throughput measurement.
#[allow(dead_code)] // only the acceptance target takes the gate
pub static TIMING_GATE: Mutex<()> = Mutex::new(());

use twinguide::calibration::{
    evaluate, fit_calibration, Branch, CalibrationModel, CalibrationSample, SensorId,
};
use twinguide::shadow::SensorFrame;

/// Reference per-sensor calibration cubics for the demo unit
/// (millivolts as a cubic in millimeters).
pub const SENSOR_1_COEFFS: [f64; 4] = [1651.9842, 46.4413, -2.6934, -0.36251];
pub const SENSOR_2_COEFFS: [f64; 4] = [1624.5567, 33.37911, -2.3102, -0.14139];

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twinguide"))
}

pub fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn twinguide");
    assert!(
        out.status.success(),
        "command failed ({:?}):\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn poly(coeffs: &[f64; 4], x: f64) -> f64 {
    coeffs[0] + x * (coeffs[1] + x * (coeffs[2] + x * coeffs[3]))
}

/// Five-cycle calibration protocol: +50 → −40 kPa in 10 kPa steps, loading
/// then unloading, a few hold samples per setpoint, voltages straight off
/// the given cubics. Displacement spans ±4 mm so both cubics stay monotone.
pub fn calibration_fixture(cycles: u32, holds: usize) -> Vec<CalibrationSample> {
    let mut out = Vec::new();
    let mut t = 0.0;
    for cycle in 1..=cycles {
        for (branch, forward) in [(Branch::Loading, true), (Branch::Unloading, false)] {
            let steps: Vec<usize> = if forward {
                (0..19).collect()
            } else {
                (0..19).rev().collect()
            };
            for i in steps {
                let pressure = 50.0 - 90.0 * i as f64 / 18.0;
                let x = 4.0 - 8.0 * i as f64 / 18.0;
                for _ in 0..holds {
                    out.push(CalibrationSample {
                        t_s: t,
                        pressure_kpa: pressure,
                        displacement_mm: x,
                        v1_mv: poly(&SENSOR_1_COEFFS, x),
                        v2_mv: poly(&SENSOR_2_COEFFS, x),
                        cycle,
                        branch,
                    });
                    t += 0.01;
                }
            }
        }
    }
    out
}

pub fn write_calibration_fixture(path: &Path, cycles: u32, holds: usize) {
    let samples = calibration_fixture(cycles, holds);
    let mut buf = Vec::new();
    twinguide::calibration::write_samples(&samples, &mut buf).unwrap();
    std::fs::write(path, buf).unwrap();
}

/// Models fitted from the fixture, exactly as `calibrate` would produce.
pub fn fitted_models() -> (CalibrationModel, CalibrationModel) {
    let samples = calibration_fixture(5, 1);
    (
        fit_calibration(&samples, SensorId::One).unwrap(),
        fit_calibration(&samples, SensorId::Two).unwrap(),
    )
}

/// A stream whose voltages are exactly what the models predict for the
/// displacement trajectory `d(t)`, with constant ambient offsets.
pub fn stream_from_models(
    models: &(CalibrationModel, CalibrationModel),
    n_frames: usize,
    dt: f64,
    mut displacement: impl FnMut(f64) -> f64,
    mut pressure: impl FnMut(f64) -> Option<f64>,
) -> Vec<SensorFrame> {
    (0..n_frames)
        .map(|i| {
            let t = i as f64 * dt;
            let d = displacement(t);
            SensorFrame {
                t_s: t,
                v1_active_mv: evaluate(&models.0, d) + 40.0,
                v1_ambient_mv: 40.0,
                v2_active_mv: evaluate(&models.1, d) + 25.0,
                v2_ambient_mv: 25.0,
                pressure_kpa: pressure(t),
            }
        })
        .collect()
}

pub fn write_stream(path: &Path, frames: &[SensorFrame]) {
    let mut buf = Vec::new();
    twinguide::shadow::write_stream_csv(frames, &mut buf).unwrap();
    std::fs::write(path, buf).unwrap();
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Generate the default synthetic library CSV via the binary.
pub fn synth_states(dir: &Path) -> PathBuf {
    run_ok(bin().args(["synth-states", "--out-dir", path_str(dir)]));
    dir.join("states.csv")
}
