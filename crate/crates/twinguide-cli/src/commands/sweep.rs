//! `twinguide sweep` — pattern-parameter grid search.

use std::path::PathBuf;

use clap::Args;
use twinguide::design::{
    emit_heatmap_table, run_sweep, sweep_csv, FitRegressor, SweepConfig, SweepGrid,
};
use twinguide::geometry::SceneBuilder;
use twinguide::raytrace::TraceConfig;

use crate::commands::{load_state_library, SideArg};
use crate::config::{resolve, ConfigEcho, ConfigFile};
use crate::{ensure_out_dir, file_sha256, run_err, write_output, CliError};

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Tracked-point CSV with deformation states.
    #[arg(long)]
    pub states: Option<PathBuf>,
    /// Grid restriction as key=value tokens (width, depth, spacing,
    /// cavities). Values: a number, a comma list, or lo:hi:step. Without
    /// --grid the full standard grid runs (6×6×6 × {3,5,7} cavities).
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub grid: Vec<String>,
    /// Worker threads (0 = all logical cores).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub rays: Option<usize>,
    #[arg(long)]
    pub thickness: Option<f64>,
    #[arg(long)]
    pub cavity_side: Option<SideArg>,
    /// Fit abscissa: state-index or tip-displacement.
    #[arg(long)]
    pub regressor: Option<String>,
    /// Fail series with zero sign changes instead of guarding the divisor.
    #[arg(long)]
    pub literal_n_sign: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn parse_float_list(value: &str) -> Result<Vec<f64>, CliError> {
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::validation(format!(
                "range '{value}' must be lo:hi:step"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.parse::<f64>()
                    .map_err(|_| CliError::validation(format!("bad number '{p}' in '{value}'")))
            })
            .collect::<Result<_, _>>()?;
        let (lo, hi, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 || hi < lo {
            return Err(CliError::validation(format!("bad range '{value}'")));
        }
        let n = ((hi - lo) / step).round() as usize;
        return Ok((0..=n).map(|i| lo + step * i as f64).collect());
    }
    value
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(format!("bad number '{p}' in '{value}'")))
        })
        .collect()
}

fn parse_grid(tokens: &[String]) -> Result<SweepGrid, CliError> {
    let mut grid = SweepGrid::standard();
    for token in tokens {
        let Some((key, value)) = token.split_once('=') else {
            return Err(CliError::validation(format!(
                "grid token '{token}' must be key=value"
            )));
        };
        match key {
            "width" => grid.widths = parse_float_list(value)?,
            "depth" => grid.depths = parse_float_list(value)?,
            "spacing" => grid.spacings = parse_float_list(value)?,
            "cavities" => {
                grid.cavity_counts = value
                    .split(',')
                    .map(|p| {
                        p.trim()
                            .parse::<usize>()
                            .map_err(|_| CliError::validation(format!("bad cavity count '{p}'")))
                    })
                    .collect::<Result<_, _>>()?;
            }
            other => {
                return Err(CliError::validation(format!(
                    "unknown grid key '{other}' (expected width|depth|spacing|cavities)"
                )))
            }
        }
    }
    Ok(grid)
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_ref())?;
    let states_path = match (&args.states, cfg.get::<PathBuf>("states")?) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => p,
        (None, None) => return Err(CliError::validation("missing --states file")),
    };
    let grid_tokens: Vec<String> = if args.grid.is_empty() {
        cfg.get::<String>("grid")?
            .map(|s| s.split_whitespace().map(str::to_string).collect())
            .unwrap_or_default()
    } else {
        args.grid.clone()
    };
    let grid = parse_grid(&grid_tokens)?;

    let library = load_state_library(&states_path)?;
    let trace_defaults = TraceConfig::default();
    let builder_defaults = SceneBuilder::default();
    let regressor_name = resolve(args.regressor, &cfg, "regressor", "state-index".to_string())?;
    let regressor = match regressor_name.as_str() {
        "state-index" => FitRegressor::StateIndex,
        "tip-displacement" => FitRegressor::TipDisplacement,
        other => {
            return Err(CliError::validation(format!(
                "bad regressor '{other}' (expected state-index|tip-displacement)"
            )))
        }
    };
    let config = SweepConfig {
        trace: TraceConfig {
            n_primary: resolve(args.rays, &cfg, "rays", trace_defaults.n_primary)?,
            ..trace_defaults
        },
        builder: SceneBuilder {
            thickness: resolve(
                args.thickness,
                &cfg,
                "thickness",
                builder_defaults.thickness,
            )?,
            cavity_side: resolve(
                args.cavity_side,
                &cfg,
                "cavity_side",
                SideArg(builder_defaults.cavity_side),
            )?
            .0,
            ..builder_defaults
        },
        regressor,
        workers: resolve(args.workers, &cfg, "workers", 0usize)?,
        literal_n_sign: args.literal_n_sign || cfg.get::<bool>("literal_n_sign")?.unwrap_or(false),
    };

    let outcome = run_sweep(&library, &grid, &config).map_err(run_err)?;

    ensure_out_dir(&args.out_dir)?;
    write_output(
        &args.out_dir.join("sweep.csv"),
        &sweep_csv(&outcome.records, library.len()),
    )?;

    // One heatmap slice per (cavity count, width) pair present in the grid.
    for &c in &grid.cavity_counts {
        for &w in &grid.widths {
            let table = emit_heatmap_table(&outcome.records, c, w);
            if table.empty_slice {
                eprintln!("warning: heatmap slice cavities={c} width={w} matched no records");
            }
            write_output(
                &args.out_dir.join(format!("heatmap_c{c}_w{w}.csv")),
                &table.to_csv(),
            )?;
        }
    }

    if let Some(best) = outcome.best_record() {
        write_output(
            &args.out_dir.join("best.json"),
            &serde_json::to_string_pretty(best).map_err(run_err)?,
        )?;
    }

    // Provenance sidecar: effective configuration, input hash, and the hash
    // of the rest-state unpatterned scene the sweep derives from.
    let rest_hash = library
        .states()
        .iter()
        .find(|s| s.label == twinguide::deformation::StateLabel::Rest)
        .or_else(|| library.states().first())
        .and_then(|state| {
            twinguide::raytrace::scene_for_state(
                state,
                &twinguide::geometry::PatternSpec::new(0, 1.0, 0.5, 0.9),
                &config.builder,
                library.sample_interval_mm,
            )
            .ok()
        })
        .map(|scene| scene.content_hash());
    let sidecar = serde_json::json!({
        "engine_version": env!("CARGO_PKG_VERSION"),
        "states_file": states_path.display().to_string(),
        "states_sha256": file_sha256(&states_path)?,
        "base_scene_hash": rest_hash,
        "grid": {
            "cavity_counts": grid.cavity_counts,
            "widths": grid.widths,
            "depths": grid.depths,
            "spacings": grid.spacings,
        },
        "config": config,
        "n_records": outcome.records.len(),
        "n_failed": outcome.n_failed,
        "secondary_budget_scope": "global",
        "normalization": "joint across cavity-count tiers",
    });
    write_output(
        &args.out_dir.join("sweep_meta.json"),
        &serde_json::to_string_pretty(&sidecar).map_err(run_err)?,
    )?;

    let mut echo = ConfigEcho::new("sweep");
    echo.set("states", states_path.display());
    if !grid_tokens.is_empty() {
        echo.set("grid", grid_tokens.join(" "));
    }
    echo.set("rays", config.trace.n_primary);
    echo.set("thickness", config.builder.thickness);
    echo.set("cavity_side", SideArg(config.builder.cavity_side));
    echo.set("regressor", &regressor_name);
    echo.set("workers", config.workers);
    echo.set("literal_n_sign", config.literal_n_sign);
    echo.write(&args.out_dir)?;

    match outcome.best_record() {
        Some(best) => println!(
            "{} records ({} failed); best {},{},{},{} with P_norm 1",
            outcome.records.len(),
            outcome.n_failed,
            best.spec.cavity_count,
            best.spec.width,
            best.spec.depth,
            best.spec.spacing
        ),
        None => println!("{} records, all failed", outcome.records.len()),
    }
    Ok(())
}
