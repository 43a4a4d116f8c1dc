//! Generate demo input files for the pipeline script: a five-cycle
//! calibration log synthesized from a plausible pair of sensor cubics, and a
//! matching healthy endurance stream.
//!
//! Usage: `cargo run --release -p twinguide --example make_fixtures -- OUT_DIR`

use std::path::PathBuf;

use twinguide::calibration::evaluate;
use twinguide::calibration::{fit_calibration, write_samples, Branch, CalibrationSample, SensorId};
use twinguide::shadow::{write_stream_csv, NominalModel, SensorFrame};

const SENSOR_1: [f64; 4] = [1651.9842, 46.4413, -2.6934, -0.36251];
const SENSOR_2: [f64; 4] = [1624.5567, 33.37911, -2.3102, -0.14139];

fn poly(c: &[f64; 4], x: f64) -> f64 {
    c[0] + x * (c[1] + x * (c[2] + x * c[3]))
}

fn main() {
    let out: PathBuf = std::env::args()
        .nth(1)
        .unwrap_or_else(|| ".".to_string())
        .into();
    std::fs::create_dir_all(&out).expect("create output directory");

    // Five loading/unloading cycles, +50 → −40 kPa in 10 kPa steps, three
    // hold samples per setpoint, displacement spanning ±4 mm.
    let mut samples = Vec::new();
    let mut t = 0.0;
    for cycle in 1..=5u32 {
        for (branch, forward) in [(Branch::Loading, true), (Branch::Unloading, false)] {
            let steps: Vec<usize> = if forward {
                (0..19).collect()
            } else {
                (0..19).rev().collect()
            };
            for i in steps {
                let pressure = 50.0 - 90.0 * i as f64 / 18.0;
                let x = 4.0 - 8.0 * i as f64 / 18.0;
                for _ in 0..3 {
                    samples.push(CalibrationSample {
                        t_s: t,
                        pressure_kpa: pressure,
                        displacement_mm: x,
                        v1_mv: poly(&SENSOR_1, x),
                        v2_mv: poly(&SENSOR_2, x),
                        cycle,
                        branch,
                    });
                    t += 0.01;
                }
            }
        }
    }
    let calib_path = out.join("calib.csv");
    let mut buf = Vec::new();
    write_samples(&samples, &mut buf).unwrap();
    std::fs::write(&calib_path, buf).unwrap();

    // Healthy 100-cycle endurance stream at 100 Hz: sinusoidal pressure,
    // displacement following the nominal table, voltages off the fitted
    // models plus constant ambient offsets.
    let model_1 = fit_calibration(&samples, SensorId::One).unwrap();
    let model_2 = fit_calibration(&samples, SensorId::Two).unwrap();
    let nominal = NominalModel::fit_from_samples(&samples).unwrap();
    let frames: Vec<SensorFrame> = (0..20_000)
        .map(|n| {
            let t = n as f64 * 0.01;
            let pressure = 5.0 + 40.0 * (std::f64::consts::TAU * t / 2.0).sin();
            let d = nominal.displacement_at(pressure);
            SensorFrame {
                t_s: t,
                v1_active_mv: evaluate(&model_1, d) + 40.0,
                v1_ambient_mv: 40.0,
                v2_active_mv: evaluate(&model_2, d) + 25.0,
                v2_ambient_mv: 25.0,
                pressure_kpa: Some(pressure),
            }
        })
        .collect();
    let stream_path = out.join("stream.csv");
    let mut buf = Vec::new();
    write_stream_csv(&frames, &mut buf).unwrap();
    std::fs::write(&stream_path, buf).unwrap();

    println!(
        "wrote {} and {}",
        calib_path.display(),
        stream_path.display()
    );
}
