//! Grid sweeps over pattern parameters with deterministic, worker-count
//! independent output.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformation::StateLibrary;
use crate::design::polyfit::fit_cubic;
use crate::design::score::{score, Score};
use crate::error::{Error, Result};
use crate::geometry::{carve_pattern, place_optics, PatternSpec, Scene, SceneBuilder};
use crate::raytrace::{trace, TraceConfig};

/// Pattern parameter grid. The standard grid steps each length from 0.5 to
/// 1.0 mm by 0.1 and sweeps 3, 5 and 7 cavities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub cavity_counts: Vec<usize>,
    pub widths: Vec<f64>,
    pub depths: Vec<f64>,
    pub spacings: Vec<f64>,
}

impl SweepGrid {
    pub fn standard() -> Self {
        let steps: Vec<f64> = (5..=10).map(|i| i as f64 / 10.0).collect();
        Self {
            cavity_counts: vec![3, 5, 7],
            widths: steps.clone(),
            depths: steps.clone(),
            spacings: steps,
        }
    }

    pub fn single(spec: &PatternSpec) -> Self {
        Self {
            cavity_counts: vec![spec.cavity_count],
            widths: vec![spec.width],
            depths: vec![spec.depth],
            spacings: vec![spec.spacing],
        }
    }

    pub fn len(&self) -> usize {
        self.cavity_counts.len() * self.widths.len() * self.depths.len() * self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in canonical (cavity_count, width, depth, spacing) order.
    pub fn specs(&self) -> Vec<PatternSpec> {
        let mut out = Vec::with_capacity(self.len());
        for &c in &self.cavity_counts {
            for &w in &self.widths {
                for &d in &self.depths {
                    for &s in &self.spacings {
                        out.push(PatternSpec::new(c, w, d, s));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidInput("sweep grid is empty".into()));
        }
        for spec in self.specs() {
            spec.validate()?;
        }
        Ok(())
    }
}

/// Abscissa used for the cubic trend fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitRegressor {
    /// State index 0..N−1, compression → elongation.
    #[default]
    StateIndex,
    /// Tip displacement in millimeters.
    TipDisplacement,
}

/// Sweep configuration: tracing, geometry and scoring options.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SweepConfig {
    pub trace: TraceConfig,
    pub builder: SceneBuilder,
    pub regressor: FitRegressor,
    /// Worker threads; 0 uses all logical cores.
    pub workers: usize,
    /// Fail records whose series never increases instead of applying the
    /// max(n_sign, 1) divisor guard.
    pub literal_n_sign: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            trace: TraceConfig::default(),
            builder: SceneBuilder::default(),
            regressor: FitRegressor::StateIndex,
            workers: 0,
            literal_n_sign: false,
        }
    }
}

/// One scored grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub spec: PatternSpec,
    /// NDR per state, compression → elongation; empty when failed.
    pub ndr_series: Vec<usize>,
    /// Cubic trend coefficients, ascending degree.
    pub coeffs: [f64; 4],
    pub delta: f64,
    pub n_sign: usize,
    pub rmse: f64,
    pub p_value: f64,
    pub p_normalized: f64,
    /// Zero-RMSE sentinel: ranked above all finite records.
    pub infinite: bool,
    pub n_sign_guard_fired: bool,
    /// Geometry or trace failure; such records are excluded from
    /// normalization and ranked last.
    pub failed: Option<String>,
}

impl SweepRecord {
    pub fn flags(&self) -> String {
        let mut out = Vec::new();
        if self.infinite {
            out.push("inf".to_string());
        }
        if self.n_sign_guard_fired {
            out.push("nsign_guard".to_string());
        }
        if let Some(reason) = &self.failed {
            out.push(format!("failed:{}", reason.replace([',', '\n'], ";")));
        }
        out.join(";")
    }
}

/// Sweep output: records in ranked order plus the winner.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    /// Index of the best non-failed record, if any.
    pub best: Option<usize>,
    pub n_failed: usize,
}

impl SweepOutcome {
    pub fn best_record(&self) -> Option<&SweepRecord> {
        self.best.map(|i| &self.records[i])
    }
}

/// Per-state geometry shared by every grid point: dense centerlines, uncarved
/// outlines and optics placement (carving never touches the junction zones).
struct StateGeometry {
    label: String,
    centerlines: [Vec<crate::geometry::Point2>; 2],
    outlines: [crate::geometry::ClosedPolyline; 2],
    emitter: crate::geometry::EmitterPose,
    receiver: crate::geometry::Segment,
}

fn prepare_states(library: &StateLibrary, config: &SweepConfig) -> Result<Vec<StateGeometry>> {
    library
        .states()
        .iter()
        .map(|state| {
            let build = || -> Result<StateGeometry> {
                let [c1, c2] = state.dense_centerlines(library.sample_interval_mm)?;
                let o1 = crate::geometry::build_waveguide_outline(&c1, config.builder.thickness)?;
                let o2 = crate::geometry::build_waveguide_outline(&c2, config.builder.thickness)?;
                let (emitter, receiver) =
                    place_optics((&o1, &o2), (&c1, &c2), config.builder.standoff)?;
                Ok(StateGeometry {
                    label: state.label.to_string(),
                    centerlines: [c1, c2],
                    outlines: [o1, o2],
                    emitter,
                    receiver,
                })
            };
            build().map_err(|e| e.for_state(state.label.to_string()))
        })
        .collect()
}

/// Trace one pattern across every prepared state.
fn evaluate_spec(
    spec: &PatternSpec,
    states: &[StateGeometry],
    config: &SweepConfig,
    regressor_xs: &[f64],
) -> SweepRecord {
    let mut blank = SweepRecord {
        spec: *spec,
        ndr_series: Vec::new(),
        coeffs: [0.0; 4],
        delta: 0.0,
        n_sign: 0,
        rmse: 0.0,
        p_value: 0.0,
        p_normalized: 0.0,
        infinite: false,
        n_sign_guard_fired: false,
        failed: None,
    };

    let mut series = Vec::with_capacity(states.len());
    for geo in states {
        let run = || -> Result<usize> {
            let carved1 = carve_pattern(
                &geo.outlines[0],
                &geo.centerlines[0],
                spec,
                config.builder.cavity_side,
            )?;
            let carved2 = carve_pattern(
                &geo.outlines[1],
                &geo.centerlines[1],
                spec,
                config.builder.cavity_side,
            )?;
            let scene = Scene {
                waveguides: vec![carved1, carved2],
                emitter: geo.emitter,
                receiver: geo.receiver,
                core_index: config.builder.core_index,
                exterior_index: config.builder.exterior_index,
            };
            Ok(trace(&scene, &config.trace)?.ndr)
        };
        match run() {
            Ok(ndr) => series.push(ndr),
            Err(e) => {
                blank.failed = Some(format!("{}", e.for_state(geo.label.clone())));
                return blank;
            }
        }
    }

    let ys: Vec<f64> = series.iter().map(|&n| n as f64).collect();
    let fit = match fit_cubic(regressor_xs, &ys) {
        Ok(f) => f,
        Err(e) => {
            blank.failed = Some(e.to_string());
            return blank;
        }
    };
    let s: Score = score(&ys, &fit, regressor_xs);
    if config.literal_n_sign && s.n_sign == 0 {
        blank.ndr_series = series;
        blank.coeffs = fit.coeffs;
        blank.failed = Some("n_sign is zero and literal metric mode divides by it".into());
        return blank;
    }
    SweepRecord {
        spec: *spec,
        ndr_series: series,
        coeffs: fit.coeffs,
        delta: s.delta,
        n_sign: s.n_sign,
        rmse: s.rmse,
        p_value: s.p_value,
        p_normalized: 0.0,
        infinite: s.infinite,
        n_sign_guard_fired: s.n_sign_guard_fired,
        failed: None,
    }
}

/// Run the sweep: one record per grid point, ranked by the figure of merit,
/// normalized against the global maximum across every cavity-count tier.
///
/// Grid points are independent jobs; results are merged back into canonical
/// order before ranking, so the output is identical for any worker count.
pub fn run_sweep(
    library: &StateLibrary,
    grid: &SweepGrid,
    config: &SweepConfig,
) -> Result<SweepOutcome> {
    grid.validate()?;
    if library.len() < 4 {
        return Err(Error::InvalidInput(format!(
            "sweep needs at least 4 states for the cubic fit, got {}",
            library.len()
        )));
    }
    let states = prepare_states(library, config)?;
    let regressor_xs: Vec<f64> = match config.regressor {
        FitRegressor::StateIndex => (0..library.len()).map(|i| i as f64).collect(),
        FitRegressor::TipDisplacement => library
            .states()
            .iter()
            .map(|s| s.tip_displacement_mm)
            .collect(),
    };

    let specs = grid.specs();
    let job = |spec: &PatternSpec| evaluate_spec(spec, &states, config, &regressor_xs);
    let mut records: Vec<SweepRecord> = if config.workers == 1 {
        specs.iter().map(job).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidInput(format!("worker pool: {e}")))?;
        pool.install(|| specs.par_iter().map(job).collect())
    };

    let p_max = records
        .iter()
        .filter(|r| r.failed.is_none() && !r.infinite)
        .map(|r| r.p_value)
        .fold(f64::NEG_INFINITY, f64::max);
    for r in &mut records {
        if r.failed.is_some() {
            continue;
        }
        r.p_normalized = if r.infinite {
            1.0
        } else if p_max > 0.0 {
            (r.p_value / p_max).clamp(0.0, 1.0)
        } else {
            0.0
        };
    }

    records.sort_by(rank_order);
    let n_failed = records.iter().filter(|r| r.failed.is_some()).count();
    let best = records.first().filter(|r| r.failed.is_none()).map(|_| 0);
    Ok(SweepOutcome {
        records,
        best,
        n_failed,
    })
}

/// Ranking: infinite sentinels first, then p descending, failures last; ties
/// broken lexicographically by (cavity_count, width, depth, spacing).
fn rank_order(a: &SweepRecord, b: &SweepRecord) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    match (a.failed.is_some(), b.failed.is_some()) {
        (false, true) => return Ordering::Less,
        (true, false) => return Ordering::Greater,
        _ => {}
    }
    match (a.infinite, b.infinite) {
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        _ => {}
    }
    b.p_value
        .total_cmp(&a.p_value)
        .then_with(|| spec_key(&a.spec).partial_cmp(&spec_key(&b.spec)).unwrap())
}

fn spec_key(s: &PatternSpec) -> (usize, f64, f64, f64) {
    (s.cavity_count, s.width, s.depth, s.spacing)
}

/// Render records as the sweep CSV. Column layout:
/// `cavity_count,width_mm,depth_mm,spacing_mm,ndr_s1..ndr_sN,a0..a3,delta,n_sign,rmse,p,p_norm,flags`.
pub fn sweep_csv(records: &[SweepRecord], n_states: usize) -> String {
    let mut out = String::new();
    out.push_str("cavity_count,width_mm,depth_mm,spacing_mm");
    for i in 1..=n_states {
        out.push_str(&format!(",ndr_s{i}"));
    }
    out.push_str(",a0,a1,a2,a3,delta,n_sign,rmse,p,p_norm,flags\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}",
            r.spec.cavity_count, r.spec.width, r.spec.depth, r.spec.spacing
        ));
        if r.failed.is_some() && r.ndr_series.is_empty() {
            for _ in 0..n_states {
                out.push(',');
            }
        } else {
            for v in &r.ndr_series {
                out.push_str(&format!(",{v}"));
            }
        }
        if r.failed.is_some() {
            out.push_str(",,,,,,,,");
        } else {
            out.push_str(&format!(
                ",{},{},{},{},{},{},{},{}",
                r.coeffs[0],
                r.coeffs[1],
                r.coeffs[2],
                r.coeffs[3],
                r.delta,
                r.n_sign,
                r.rmse,
                fmt_p(r.p_value)
            ));
        }
        out.push_str(&format!(",{},{}\n", fmt_p(r.p_normalized), r.flags()));
    }
    out
}

fn fmt_p(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

/// The (depth × spacing) slice of normalized scores at fixed cavity count
/// and width.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapTable {
    pub cavity_count: usize,
    pub width: f64,
    pub depths: Vec<f64>,
    pub spacings: Vec<f64>,
    /// Row-major `[depth][spacing]`; `None` marks missing cells.
    pub values: Vec<Vec<Option<f64>>>,
    /// Set when the requested slice matched no records.
    pub empty_slice: bool,
}

/// Collect the heatmap slice for a fixed (cavity_count, width).
pub fn emit_heatmap_table(
    records: &[SweepRecord],
    cavity_count: usize,
    width: f64,
) -> HeatmapTable {
    let slice: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| {
            r.failed.is_none()
                && r.spec.cavity_count == cavity_count
                && (r.spec.width - width).abs() < 1e-9
        })
        .collect();
    let mut depths: Vec<f64> = slice.iter().map(|r| r.spec.depth).collect();
    let mut spacings: Vec<f64> = slice.iter().map(|r| r.spec.spacing).collect();
    depths.sort_by(f64::total_cmp);
    depths.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    spacings.sort_by(f64::total_cmp);
    spacings.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let mut values = vec![vec![None; spacings.len()]; depths.len()];
    for r in &slice {
        let di = depths
            .iter()
            .position(|d| (d - r.spec.depth).abs() < 1e-9)
            .unwrap();
        let si = spacings
            .iter()
            .position(|s| (s - r.spec.spacing).abs() < 1e-9)
            .unwrap();
        values[di][si] = Some(r.p_normalized);
    }
    HeatmapTable {
        cavity_count,
        width,
        empty_slice: slice.is_empty(),
        depths,
        spacings,
        values,
    }
}

impl HeatmapTable {
    /// CSV matrix: rows = depth ascending, columns = spacing ascending,
    /// missing cells empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("depth_mm");
        for s in &self.spacings {
            out.push_str(&format!(",{s}"));
        }
        out.push('\n');
        for (di, d) in self.depths.iter().enumerate() {
            out.push_str(&format!("{d}"));
            for si in 0..self.spacings.len() {
                match self.values[di][si] {
                    Some(v) => out.push_str(&format!(",{}", fmt_p(v))),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}
