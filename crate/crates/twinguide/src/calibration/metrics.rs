//! Sensor quality metrics from cycle data: full-range sensitivity, branch
//! hysteresis, and noise-floor SNR.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calibration::fit::evaluate;
use crate::calibration::{Branch, CalibrationModel, CalibrationSample, SensorId};
use crate::error::{Error, Result};

/// Displacement grid step for branch comparison.
const HYSTERESIS_GRID_MM: f64 = 0.1;

/// Fraction of each setpoint hold discarded as settling before noise
/// estimation.
const SETTLING_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Full-range secant slope |v(x_max) − v(x_min)| / (x_max − x_min).
    pub sensitivity_mv_per_mm: f64,
    /// Peak loading/unloading separation as % of full-scale output; absent
    /// when a branch is missing.
    pub hysteresis_pct: Option<f64>,
    /// 20·log10(full-scale span / pooled setpoint noise); +∞ for noiseless
    /// fixtures.
    pub snr_db: f64,
    pub flags: Vec<String>,
}

/// Compute the metric suite for one sensor against its fitted model.
///
/// Sensitivity uses the full-range secant of the model (the range-averaged
/// slope, not the linear coefficient). Hysteresis compares branch means on a
/// 0.1 mm displacement grid against the full-scale output span. SNR pools the
/// standard deviation of repeated setpoints after dropping the first 10% of
/// each hold as settling.
pub fn metrics(
    samples: &[CalibrationSample],
    model: &CalibrationModel,
    sensor: SensorId,
) -> Result<Metrics> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("no calibration samples".into()));
    }
    let mut flags = Vec::new();
    let (x_min, x_max) = model.valid_range;
    if x_max <= x_min {
        return Err(Error::InvalidInput(
            "degenerate displacement range in model".into(),
        ));
    }
    let sensitivity = (evaluate(model, x_max) - evaluate(model, x_min)).abs() / (x_max - x_min);

    let span = full_scale_span(samples, sensor);
    let hysteresis = hysteresis_pct(samples, sensor, span, &mut flags);
    let snr = snr_db(samples, sensor, span);

    Ok(Metrics {
        sensitivity_mv_per_mm: sensitivity,
        hysteresis_pct: hysteresis,
        snr_db: snr,
        flags,
    })
}

/// System-level sensitivity: the average of the two per-sensor values.
pub fn system_sensitivity(sensor_1_mv_per_mm: f64, sensor_2_mv_per_mm: f64) -> f64 {
    0.5 * (sensor_1_mv_per_mm + sensor_2_mv_per_mm)
}

fn full_scale_span(samples: &[CalibrationSample], sensor: SensorId) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in samples {
        let v = s.voltage(sensor);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo
}

/// Setpoint key: displacement rounded to a nanometer so float noise in file
/// round-trips cannot split a hold.
fn setpoint_key(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

fn hysteresis_pct(
    samples: &[CalibrationSample],
    sensor: SensorId,
    span: f64,
    flags: &mut Vec<String>,
) -> Option<f64> {
    let mut branch_curves: [BTreeMap<i64, (f64, usize)>; 2] = [BTreeMap::new(), BTreeMap::new()];
    for s in samples {
        let slot = match s.branch {
            Branch::Loading => &mut branch_curves[0],
            Branch::Unloading => &mut branch_curves[1],
        };
        let e = slot
            .entry(setpoint_key(s.displacement_mm))
            .or_insert((0.0, 0));
        e.0 += s.voltage(sensor);
        e.1 += 1;
    }
    if branch_curves[0].is_empty() || branch_curves[1].is_empty() {
        flags.push("hysteresis undefined: a branch is missing".into());
        return None;
    }
    if span <= 0.0 {
        flags.push("hysteresis undefined: zero full-scale span".into());
        return None;
    }
    let curves: Vec<Vec<(f64, f64)>> = branch_curves
        .iter()
        .map(|m| {
            m.iter()
                .map(|(&k, &(sum, n))| (k as f64 / 1e6, sum / n as f64))
                .collect()
        })
        .collect();

    // Overlapping displacement window of the two branches.
    let lo = curves[0][0].0.max(curves[1][0].0);
    let hi = curves[0].last().unwrap().0.min(curves[1].last().unwrap().0);
    if hi <= lo {
        flags.push("hysteresis undefined: branches do not overlap".into());
        return None;
    }
    let steps = ((hi - lo) / HYSTERESIS_GRID_MM).ceil() as usize;
    let mut worst = 0.0f64;
    for i in 0..=steps {
        let x = lo + (hi - lo) * i as f64 / steps.max(1) as f64;
        let dv = (interp(&curves[0], x) - interp(&curves[1], x)).abs();
        worst = worst.max(dv);
    }
    Some(100.0 * worst / span)
}

fn interp(curve: &[(f64, f64)], x: f64) -> f64 {
    match curve.binary_search_by(|(cx, _)| cx.total_cmp(&x)) {
        Ok(i) => curve[i].1,
        Err(0) => curve[0].1,
        Err(i) if i >= curve.len() => curve[curve.len() - 1].1,
        Err(i) => {
            let (x0, y0) = curve[i - 1];
            let (x1, y1) = curve[i];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

fn snr_db(samples: &[CalibrationSample], sensor: SensorId, span: f64) -> f64 {
    // Split into holds: consecutive runs at one (cycle, branch, setpoint).
    let mut ordered: Vec<&CalibrationSample> = samples.iter().collect();
    ordered.sort_by(|a, b| a.t_s.total_cmp(&b.t_s));
    let mut holds: Vec<Vec<f64>> = Vec::new();
    let mut current_id: Option<(u32, Branch, i64)> = None;
    for s in ordered {
        let id = (s.cycle, s.branch, setpoint_key(s.displacement_mm));
        if current_id != Some(id) {
            holds.push(Vec::new());
            current_id = Some(id);
        }
        holds.last_mut().unwrap().push(s.voltage(sensor));
    }

    let mut ss = 0.0f64;
    let mut dof = 0usize;
    for hold in &holds {
        let settle = (hold.len() as f64 * SETTLING_FRACTION).floor() as usize;
        let kept = &hold[settle..];
        if kept.len() < 2 {
            continue;
        }
        let mean = kept.iter().sum::<f64>() / kept.len() as f64;
        ss += kept.iter().map(|v| (v - mean).powi(2)).sum::<f64>();
        dof += kept.len() - 1;
    }
    if dof == 0 {
        return f64::INFINITY;
    }
    let sigma = (ss / dof as f64).sqrt();
    if sigma == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (span / sigma).log10()
    }
}
