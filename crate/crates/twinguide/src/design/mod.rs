//! Pattern design optimization: sweep the cavity-parameter grid across the
//! deformation states, fit the cubic NDR trend, and rank designs by the
//! figure of merit `P = Δ / (n_sign · RMSE)` normalized to its global
//! maximum.

mod polyfit;
mod score;
mod sweep;

pub use polyfit::{fit_cubic, CubicFit};
pub use score::{score, Score};
pub use sweep::{
    emit_heatmap_table, run_sweep, sweep_csv, FitRegressor, HeatmapTable, SweepConfig, SweepGrid,
    SweepOutcome, SweepRecord,
};
