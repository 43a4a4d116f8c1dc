//! `twinguide synth-states` — generate a synthetic deformation library.

use std::path::PathBuf;

use clap::Args;
use twinguide::deformation::{synthesize_states, write_states, SynthSpec};

use crate::config::{resolve, ConfigEcho, ConfigFile};
use crate::{ensure_out_dir, input_err, run_err, CliError};

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// key=value config file; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Waveguide arc length in mm, fixed across states.
    #[arg(long)]
    pub arc_span: Option<f64>,
    /// Bow height at rest, mm.
    #[arg(long)]
    pub rest_bow: Option<f64>,
    /// Bow at maximum compression, mm.
    #[arg(long)]
    pub bow_min: Option<f64>,
    /// Bow at maximum elongation, mm.
    #[arg(long)]
    pub bow_max: Option<f64>,
    /// Number of states (odd).
    #[arg(long)]
    pub states: Option<usize>,
    /// Centerline sampling interval, mm.
    #[arg(long)]
    pub interval: Option<f64>,
    /// Pressure at the extreme states, ±kPa.
    #[arg(long)]
    pub pressure_span: Option<f64>,
    /// Output CSV filename inside the output directory.
    #[arg(long, default_value = "states.csv")]
    pub out: String,
}

pub fn run(args: SynthArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_ref())?;
    let defaults = SynthSpec::default();
    let spec = SynthSpec {
        arc_span_mm: resolve(args.arc_span, &cfg, "arc_span", defaults.arc_span_mm)?,
        rest_bow_mm: resolve(args.rest_bow, &cfg, "rest_bow", defaults.rest_bow_mm)?,
        bow_range_mm: (
            resolve(args.bow_min, &cfg, "bow_min", defaults.bow_range_mm.0)?,
            resolve(args.bow_max, &cfg, "bow_max", defaults.bow_range_mm.1)?,
        ),
        n_states: resolve(args.states, &cfg, "states", defaults.n_states)?,
        sample_interval_mm: resolve(args.interval, &cfg, "interval", defaults.sample_interval_mm)?,
        pressure_span_kpa: resolve(
            args.pressure_span,
            &cfg,
            "pressure_span",
            defaults.pressure_span_kpa,
        )?,
    };

    let library = synthesize_states(&spec).map_err(input_err)?;

    ensure_out_dir(&args.out_dir)?;
    let out_path = args.out_dir.join(&args.out);
    let mut buf = Vec::new();
    write_states(&library, &mut buf).map_err(run_err)?;
    std::fs::write(&out_path, &buf)
        .map_err(|e| CliError::runtime(format!("writing {}: {e}", out_path.display())))?;

    let mut echo = ConfigEcho::new("synth-states");
    echo.set("arc_span", spec.arc_span_mm);
    echo.set("rest_bow", spec.rest_bow_mm);
    echo.set("bow_min", spec.bow_range_mm.0);
    echo.set("bow_max", spec.bow_range_mm.1);
    echo.set("states", spec.n_states);
    echo.set("interval", spec.sample_interval_mm);
    echo.set("pressure_span", spec.pressure_span_kpa);
    echo.set("out", &args.out);
    echo.write(&args.out_dir)?;

    println!("wrote {} states to {}", library.len(), out_path.display());
    Ok(())
}
