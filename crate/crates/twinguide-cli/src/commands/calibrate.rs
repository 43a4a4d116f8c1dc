//! `twinguide calibrate` — fit per-sensor models and quality metrics.

use std::path::PathBuf;

use clap::Args;
use twinguide::calibration::{
    fit_calibration, load_samples, metrics, system_sensitivity, SensorId,
};
use twinguide::shadow::NominalModel;

use crate::config::{ConfigEcho, ConfigFile};
use crate::{ensure_out_dir, file_sha256, input_err, read_input, run_err, write_output, CliError};

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Calibration cycle CSV
    /// (t_s,pressure_kpa,displacement_mm,v1_mv,v2_mv,cycle,branch).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: CalibrateArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_ref())?;
    let samples_path = match (&args.samples, cfg.get::<PathBuf>("samples")?) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => p,
        (None, None) => return Err(CliError::validation("missing --samples file")),
    };
    let text = read_input(&samples_path)?;
    let samples = load_samples(text.as_bytes()).map_err(input_err)?;

    let model_1 = fit_calibration(&samples, SensorId::One).map_err(run_err)?;
    let model_2 = fit_calibration(&samples, SensorId::Two).map_err(run_err)?;
    let metrics_1 = metrics(&samples, &model_1, SensorId::One).map_err(run_err)?;
    let metrics_2 = metrics(&samples, &model_2, SensorId::Two).map_err(run_err)?;
    let nominal = NominalModel::fit_from_samples(&samples).map_err(run_err)?;

    ensure_out_dir(&args.out_dir)?;
    write_output(&args.out_dir.join("model_sensor1.json"), &model_1.to_json())?;
    write_output(&args.out_dir.join("model_sensor2.json"), &model_2.to_json())?;
    write_output(&args.out_dir.join("nominal.json"), &nominal.to_json())?;

    let report = serde_json::json!({
        "engine_version": env!("CARGO_PKG_VERSION"),
        "samples_file": samples_path.display().to_string(),
        "samples_sha256": file_sha256(&samples_path)?,
        "n_samples": samples.len(),
        "voltage_unit": "mV",
        "sensor_1": {
            "coefficients": model_1.coeffs,
            "r_squared": model_1.r_squared,
            "monotone": model_1.monotone,
            "inversion_enabled": model_1.monotone,
            "valid_range_mm": model_1.valid_range,
            "warnings": model_1.warnings,
            "metrics": metrics_1,
        },
        "sensor_2": {
            "coefficients": model_2.coeffs,
            "r_squared": model_2.r_squared,
            "monotone": model_2.monotone,
            "inversion_enabled": model_2.monotone,
            "valid_range_mm": model_2.valid_range,
            "warnings": model_2.warnings,
            "metrics": metrics_2,
        },
        "system_sensitivity_mv_per_mm": system_sensitivity(
            metrics_1.sensitivity_mv_per_mm,
            metrics_2.sensitivity_mv_per_mm,
        ),
    });
    write_output(
        &args.out_dir.join("metrics.json"),
        &serde_json::to_string_pretty(&report).map_err(run_err)?,
    )?;

    let mut echo = ConfigEcho::new("calibrate");
    echo.set("samples", samples_path.display());
    echo.write(&args.out_dir)?;

    println!(
        "sensor 1: r²={:.5} sensitivity {:.2} mV/mm; sensor 2: r²={:.5} sensitivity {:.2} mV/mm",
        model_1.r_squared,
        metrics_1.sensitivity_mv_per_mm,
        model_2.r_squared,
        metrics_2.sensitivity_mv_per_mm
    );
    Ok(())
}
