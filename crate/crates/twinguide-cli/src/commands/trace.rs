//! `twinguide trace` — one scene, one fan, NDR out.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use twinguide::deformation::StateLabel;
use twinguide::geometry::svg::render_scene;
use twinguide::geometry::{Scene, SceneBuilder};
use twinguide::raytrace::{scene_for_state, trace, PowerLedger, TraceConfig};

use crate::commands::{load_state_library, PatternArg, SideArg};
use crate::config::{resolve, ConfigEcho, ConfigFile};
use crate::{ensure_out_dir, file_sha256, input_err, read_input, run_err, write_output, CliError};

#[derive(Args, Debug)]
pub struct TraceArgs {
    /// Tracked-point CSV with deformation states.
    #[arg(long, conflicts_with = "scene")]
    pub states: Option<PathBuf>,
    /// Scene JSON produced by a previous run (alternative to --states).
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// State label to trace when using --states (e.g. rest, compression_7).
    #[arg(long)]
    pub state: Option<String>,
    /// Cavity pattern as cavity_count,width,depth,spacing.
    #[arg(long)]
    pub pattern: Option<PatternArg>,
    /// Write an SVG rendering of the scene and ray paths.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Export the constructed scene as JSON (reusable via --scene).
    #[arg(long)]
    pub scene_out: Option<PathBuf>,
    #[arg(long)]
    pub rays: Option<usize>,
    /// Full fan aperture in degrees.
    #[arg(long)]
    pub aperture: Option<f64>,
    #[arg(long)]
    pub max_secondary: Option<usize>,
    #[arg(long)]
    pub power_floor: Option<f64>,
    #[arg(long)]
    pub detect_threshold: Option<f64>,
    #[arg(long)]
    pub max_bounces: Option<usize>,
    /// Waveguide thickness, mm.
    #[arg(long)]
    pub thickness: Option<f64>,
    /// Emitter/receiver standoff from the junctions, mm.
    #[arg(long)]
    pub standoff: Option<f64>,
    #[arg(long)]
    pub core_index: Option<f64>,
    #[arg(long)]
    pub exterior_index: Option<f64>,
    /// Surface that receives the cavities: outer|inner.
    #[arg(long)]
    pub cavity_side: Option<SideArg>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Result JSON filename inside the output directory.
    #[arg(long, default_value = "trace.json")]
    pub out: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Serialize)]
struct TraceReport<'a> {
    ndr: usize,
    detected_power: f64,
    ledger: PowerLedger,
    scene_hash: String,
    config: &'a serde_json::Value,
    inputs: serde_json::Value,
}

pub fn run(args: TraceArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_ref())?;
    let trace_defaults = TraceConfig::default();
    let builder_defaults = SceneBuilder::default();

    let trace_config = TraceConfig {
        n_primary: resolve(args.rays, &cfg, "rays", trace_defaults.n_primary)?,
        aperture_deg: resolve(args.aperture, &cfg, "aperture", trace_defaults.aperture_deg)?,
        max_secondary: resolve(
            args.max_secondary,
            &cfg,
            "max_secondary",
            trace_defaults.max_secondary,
        )?,
        power_floor: resolve(
            args.power_floor,
            &cfg,
            "power_floor",
            trace_defaults.power_floor,
        )?,
        detect_threshold: resolve(
            args.detect_threshold,
            &cfg,
            "detect_threshold",
            trace_defaults.detect_threshold,
        )?,
        max_bounces: resolve(
            args.max_bounces,
            &cfg,
            "max_bounces",
            trace_defaults.max_bounces,
        )?,
        wavelength_nm: trace_defaults.wavelength_nm,
        record_paths: args.svg.is_some(),
    };
    let builder = SceneBuilder {
        thickness: resolve(
            args.thickness,
            &cfg,
            "thickness",
            builder_defaults.thickness,
        )?,
        standoff: resolve(args.standoff, &cfg, "standoff", builder_defaults.standoff)?,
        core_index: resolve(
            args.core_index,
            &cfg,
            "core_index",
            builder_defaults.core_index,
        )?,
        exterior_index: resolve(
            args.exterior_index,
            &cfg,
            "exterior_index",
            builder_defaults.exterior_index,
        )?,
        cavity_side: resolve(
            args.cavity_side,
            &cfg,
            "cavity_side",
            SideArg(builder_defaults.cavity_side),
        )?
        .0,
    };
    let pattern = resolve(
        args.pattern,
        &cfg,
        "pattern",
        PatternArg(twinguide::geometry::PatternSpec::new(5, 1.0, 0.5, 0.9)),
    )?;
    let state_label = resolve(args.state, &cfg, "state", "rest".to_string())?;
    let states_path = match (&args.states, cfg.get::<PathBuf>("states")?) {
        (Some(p), _) => Some(p.clone()),
        (None, p) => p,
    };
    let scene_path = match (&args.scene, cfg.get::<PathBuf>("scene")?) {
        (Some(p), _) => Some(p.clone()),
        (None, p) => p,
    };

    let mut inputs = serde_json::Map::new();
    let scene: Scene = match (&states_path, &scene_path) {
        (Some(states_file), None) => {
            let library = load_state_library(states_file)?;
            let label: StateLabel = state_label.parse().map_err(input_err)?;
            let state = library.get(label).ok_or_else(|| {
                CliError::validation(format!(
                    "state '{state_label}' not found in {}",
                    states_file.display()
                ))
            })?;
            inputs.insert(
                "states_sha256".into(),
                serde_json::Value::String(file_sha256(states_file)?),
            );
            scene_for_state(state, &pattern.0, &builder, library.sample_interval_mm)
                .map_err(input_err)?
        }
        (None, Some(scene_file)) => {
            let text = read_input(scene_file)?;
            inputs.insert(
                "scene_sha256".into(),
                serde_json::Value::String(file_sha256(scene_file)?),
            );
            serde_json::from_str(&text)
                .map_err(|e| CliError::validation(format!("bad scene JSON: {e}")))?
        }
        _ => {
            return Err(CliError::validation(
                "exactly one of --states or --scene is required",
            ))
        }
    };

    let result = trace(&scene, &trace_config).map_err(run_err)?;

    ensure_out_dir(&args.out_dir)?;
    let mut echo = ConfigEcho::new("trace");
    if let Some(p) = &states_path {
        echo.set("states", p.display());
        echo.set("state", &state_label);
        echo.set("pattern", pattern);
    }
    if let Some(p) = &scene_path {
        echo.set("scene", p.display());
    }
    echo.set("rays", trace_config.n_primary);
    echo.set("aperture", trace_config.aperture_deg);
    echo.set("max_secondary", trace_config.max_secondary);
    echo.set("power_floor", trace_config.power_floor);
    echo.set("detect_threshold", trace_config.detect_threshold);
    echo.set("max_bounces", trace_config.max_bounces);
    echo.set("thickness", builder.thickness);
    echo.set("standoff", builder.standoff);
    echo.set("core_index", builder.core_index);
    echo.set("exterior_index", builder.exterior_index);
    echo.set("cavity_side", SideArg(builder.cavity_side));
    echo.set("out", &args.out);
    echo.write(&args.out_dir)?;

    let config_json = serde_json::json!({
        "rays": trace_config.n_primary,
        "aperture_deg": trace_config.aperture_deg,
        "max_secondary": trace_config.max_secondary,
        "power_floor": trace_config.power_floor,
        "detect_threshold": trace_config.detect_threshold,
        "max_bounces": trace_config.max_bounces,
        "wavelength_nm": trace_config.wavelength_nm,
        "thickness": builder.thickness,
        "standoff": builder.standoff,
        "core_index": builder.core_index,
        "exterior_index": builder.exterior_index,
        "cavity_side": SideArg(builder.cavity_side).to_string(),
        "engine_version": env!("CARGO_PKG_VERSION"),
    });

    let report = TraceReport {
        ndr: result.ndr,
        detected_power: result.detected_power,
        ledger: result.ledger,
        scene_hash: scene.content_hash(),
        config: &config_json,
        inputs: serde_json::Value::Object(inputs),
    };
    let out_path = args.out_dir.join(&args.out);
    write_output(
        &out_path,
        &serde_json::to_string_pretty(&report).map_err(run_err)?,
    )?;

    if let Some(svg_path) = &args.svg {
        let svg = render_scene(&scene, result.ray_paths.as_deref().unwrap_or(&[]));
        write_output(svg_path, &svg)?;
    }
    if let Some(scene_path) = &args.scene_out {
        write_output(scene_path, &scene.to_json())?;
    }

    println!(
        "ndr {} detected_power {:.6}",
        result.ndr, result.detected_power
    );
    Ok(())
}
