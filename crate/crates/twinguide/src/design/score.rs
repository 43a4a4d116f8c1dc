//! The composite figure of merit `P = Δ / (n_sign · RMSE)`.
//!
//! Δ is the fitted trend drop from maximum compression to maximum elongation
//! (positive when compression detects more rays); `n_sign` counts every
//! state-to-state NDR increase, penalizing non-monotone responses; the RMSE
//! of the cubic fit penalizes scatter.

use serde::{Deserialize, Serialize};

use crate::design::polyfit::CubicFit;

/// Scored trend for one pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    /// Fitted trend at max compression minus fitted trend at max elongation.
    pub delta: f64,
    /// Count of consecutive pairs where NDR increases toward elongation.
    pub n_sign: usize,
    pub rmse: f64,
    /// `Δ / (max(n_sign, 1) · rmse)`; `+∞` when the fit is exact.
    pub p_value: f64,
    /// A zero-RMSE fit with nonzero Δ; rank above every finite record.
    pub infinite: bool,
    /// `n_sign` was zero and the divisor guard replaced it with 1.
    pub n_sign_guard_fired: bool,
}

/// Score an NDR series (compression → elongation order) under its cubic fit.
///
/// `xs` are the fit abscissas; the first and last entries are the
/// max-compression and max-elongation regressor values.
pub fn score(ndr_series: &[f64], fit: &CubicFit, xs: &[f64]) -> Score {
    debug_assert_eq!(ndr_series.len(), xs.len());
    let delta = fit.eval(xs[0]) - fit.eval(xs[xs.len() - 1]);
    let n_sign = ndr_series.windows(2).filter(|w| w[1] > w[0]).count();
    let n_sign_guard_fired = n_sign == 0;
    let divisor_n = n_sign.max(1) as f64;

    let (p_value, infinite) = if delta == 0.0 {
        // Zero sensitivity scores zero regardless of the other terms.
        (0.0, false)
    } else if fit.rmse == 0.0 {
        (f64::INFINITY, true)
    } else {
        (delta / (divisor_n * fit.rmse), false)
    };

    Score {
        delta,
        n_sign,
        rmse: fit.rmse,
        p_value,
        infinite,
        n_sign_guard_fired,
    }
}
