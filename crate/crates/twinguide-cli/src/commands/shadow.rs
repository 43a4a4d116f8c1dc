//! `twinguide shadow` — replay a voltage stream through the digital shadow.

use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;
use twinguide::calibration::CalibrationModel;
use twinguide::shadow::{
    load_stream_csv, load_stream_ndjson, replay, NominalModel, ReplayOptions, ShadowConfig,
    ShadowEngine,
};

use crate::commands::load_state_library;
use crate::config::{resolve, ConfigEcho, ConfigFile};
use crate::{ensure_out_dir, file_sha256, input_err, read_input, run_err, write_output, CliError};

#[derive(Args, Debug)]
pub struct ShadowArgs {
    /// Sensor stream: CSV or line-delimited JSON (by extension, or --format).
    #[arg(long)]
    pub stream: Option<PathBuf>,
    /// Stream format override: csv|ndjson.
    #[arg(long)]
    pub format: Option<String>,
    /// Sensor 1 calibration model JSON.
    #[arg(long)]
    pub model1: Option<PathBuf>,
    /// Sensor 2 calibration model JSON.
    #[arg(long)]
    pub model2: Option<PathBuf>,
    /// Nominal pressure→displacement model JSON.
    #[arg(long)]
    pub nominal: Option<PathBuf>,
    /// Tracked-point CSV for shape interpolation.
    #[arg(long)]
    pub states: Option<PathBuf>,
    /// Emit one state every N frames.
    #[arg(long)]
    pub decimate: Option<usize>,
    #[arg(long)]
    pub ewma_alpha: Option<f64>,
    #[arg(long)]
    pub drift_threshold: Option<f64>,
    #[arg(long)]
    pub drift_sustain: Option<f64>,
    #[arg(long)]
    pub leak_window: Option<f64>,
    #[arg(long)]
    pub leak_drop: Option<f64>,
    #[arg(long)]
    pub leak_pressure_band: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn required_path(flag: &Option<PathBuf>, cfg: &ConfigFile, key: &str) -> Result<PathBuf, CliError> {
    match (flag, cfg.get::<PathBuf>(key)?) {
        (Some(p), _) => Ok(p.clone()),
        (None, Some(p)) => Ok(p),
        (None, None) => Err(CliError::validation(format!("missing --{key} file"))),
    }
}

pub fn run(args: ShadowArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_ref())?;
    let stream_path = required_path(&args.stream, &cfg, "stream")?;
    let model1_path = required_path(&args.model1, &cfg, "model1")?;
    let model2_path = required_path(&args.model2, &cfg, "model2")?;
    let nominal_path = required_path(&args.nominal, &cfg, "nominal")?;
    let states_path = required_path(&args.states, &cfg, "states")?;

    let format = match (&args.format, cfg.get::<String>("format")?) {
        (Some(f), _) => f.clone(),
        (None, Some(f)) => f,
        (None, None) => {
            if stream_path.extension().and_then(|e| e.to_str()) == Some("ndjson") {
                "ndjson".to_string()
            } else {
                "csv".to_string()
            }
        }
    };
    let frames = match format.as_str() {
        "csv" => load_stream_csv(read_input(&stream_path)?.as_bytes()).map_err(input_err)?,
        "ndjson" => {
            let file = std::fs::File::open(&stream_path).map_err(|e| {
                CliError::validation(format!("cannot read {}: {e}", stream_path.display()))
            })?;
            load_stream_ndjson(BufReader::new(file)).map_err(input_err)?
        }
        other => {
            return Err(CliError::validation(format!(
                "bad stream format '{other}' (expected csv|ndjson)"
            )))
        }
    };

    let model_1 = CalibrationModel::from_json(&read_input(&model1_path)?).map_err(input_err)?;
    let model_2 = CalibrationModel::from_json(&read_input(&model2_path)?).map_err(input_err)?;
    let nominal = NominalModel::from_json(&read_input(&nominal_path)?).map_err(input_err)?;
    let library = load_state_library(&states_path)?;

    let defaults = ShadowConfig::default();
    let shadow_config = ShadowConfig {
        ewma_alpha: resolve(args.ewma_alpha, &cfg, "ewma_alpha", defaults.ewma_alpha)?,
        drift_threshold_mm: resolve(
            args.drift_threshold,
            &cfg,
            "drift_threshold",
            defaults.drift_threshold_mm,
        )?,
        drift_sustain_s: resolve(
            args.drift_sustain,
            &cfg,
            "drift_sustain",
            defaults.drift_sustain_s,
        )?,
        leak_window_s: resolve(
            args.leak_window,
            &cfg,
            "leak_window",
            defaults.leak_window_s,
        )?,
        leak_drop_mm: resolve(args.leak_drop, &cfg, "leak_drop", defaults.leak_drop_mm)?,
        leak_pressure_band_kpa: resolve(
            args.leak_pressure_band,
            &cfg,
            "leak_pressure_band",
            defaults.leak_pressure_band_kpa,
        )?,
    };
    let decimate = resolve(args.decimate, &cfg, "decimate", 1usize)?;

    let mut engine =
        ShadowEngine::new(model_1, model_2, nominal, library, shadow_config).map_err(input_err)?;
    let (states, summary) =
        replay(&mut engine, &frames, &ReplayOptions { decimate }).map_err(run_err)?;

    ensure_out_dir(&args.out_dir)?;
    let mut ndjson = String::new();
    for state in &states {
        ndjson.push_str(&serde_json::to_string(state).map_err(run_err)?);
        ndjson.push('\n');
    }
    write_output(&args.out_dir.join("shadow_states.ndjson"), &ndjson)?;

    let summary_json = serde_json::json!({
        "engine_version": env!("CARGO_PKG_VERSION"),
        "stream_file": stream_path.display().to_string(),
        "stream_sha256": file_sha256(&stream_path)?,
        "config": shadow_config,
        "decimate": decimate,
        "summary": summary,
    });
    write_output(
        &args.out_dir.join("shadow_summary.json"),
        &serde_json::to_string_pretty(&summary_json).map_err(run_err)?,
    )?;

    let mut echo = ConfigEcho::new("shadow");
    echo.set("stream", stream_path.display());
    echo.set("format", &format);
    echo.set("model1", model1_path.display());
    echo.set("model2", model2_path.display());
    echo.set("nominal", nominal_path.display());
    echo.set("states", states_path.display());
    echo.set("decimate", decimate);
    echo.set("ewma_alpha", shadow_config.ewma_alpha);
    echo.set("drift_threshold", shadow_config.drift_threshold_mm);
    echo.set("drift_sustain", shadow_config.drift_sustain_s);
    echo.set("leak_window", shadow_config.leak_window_s);
    echo.set("leak_drop", shadow_config.leak_drop_mm);
    echo.set("leak_pressure_band", shadow_config.leak_pressure_band_kpa);
    echo.write(&args.out_dir)?;

    println!(
        "replayed {} frames ({} dropped) at {:.0} fps ({:.0}x real time); \
         {} states out, {} alarm episodes, max |deviation| {:.4} mm",
        summary.frames_in,
        summary.frames_dropped_regression,
        summary.throughput_fps,
        summary.speedup_vs_real_time,
        summary.states_emitted,
        summary.episodes.len(),
        summary.max_abs_deviation_mm
    );
    Ok(())
}
