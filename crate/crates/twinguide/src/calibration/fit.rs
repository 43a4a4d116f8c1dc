//! Calibration fitting, evaluation and bracketed inversion.

use crate::calibration::{CalibrationModel, CalibrationSample, SensorId};
use crate::design::fit_cubic;
use crate::error::{Error, Result};

/// R² below this raises a warning on the model (fit quality well under what a
/// healthy sensor produces), but never fails the fit.
pub const R_SQUARED_WARN_FLOOR: f64 = 0.99;

/// Least-squares cubic of sensor voltage on displacement.
///
/// The monotone flag is established on a 1 mm/1000 grid plus the analytic
/// roots of the derivative; inversion is only permitted when it holds.
pub fn fit_calibration(
    samples: &[CalibrationSample],
    sensor: SensorId,
) -> Result<CalibrationModel> {
    if samples.len() < 4 {
        return Err(Error::RankDeficientFit(format!(
            "calibration needs at least 4 samples, got {}",
            samples.len()
        )));
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.displacement_mm).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.voltage(sensor)).collect();
    let fit = fit_cubic(&xs, &ys)?;

    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res = fit.rmse * fit.rmse * ys.len() as f64;
    let mut warnings = Vec::new();
    let r_squared = if ss_tot <= f64::EPSILON * mean.abs().max(1.0) {
        warnings.push("degenerate variance: constant voltage across samples".into());
        0.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    if r_squared < R_SQUARED_WARN_FLOOR && warnings.is_empty() {
        warnings.push(format!(
            "r_squared {r_squared:.5} below the {R_SQUARED_WARN_FLOOR} quality floor"
        ));
    }

    let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let monotone = derivative_sign_constant(&fit.coeffs, x_min, x_max);
    if !monotone {
        warnings.push("model is not monotone over the valid range; inversion disabled".into());
    }

    Ok(CalibrationModel {
        sensor: sensor.index(),
        coeffs: fit.coeffs,
        r_squared,
        valid_range: (x_min, x_max),
        monotone,
        warnings,
    })
}

fn derivative(coeffs: &[f64; 4], x: f64) -> f64 {
    coeffs[1] + x * (2.0 * coeffs[2] + x * 3.0 * coeffs[3])
}

fn derivative_sign_constant(coeffs: &[f64; 4], x_min: f64, x_max: f64) -> bool {
    if x_max <= x_min {
        return true;
    }
    let mut probes: Vec<f64> = Vec::new();
    let steps = (((x_max - x_min) / 1e-3).ceil() as usize).clamp(2, 200_000);
    for i in 0..=steps {
        probes.push(x_min + (x_max - x_min) * i as f64 / steps as f64);
    }
    // Roots of the quadratic derivative, in case the grid straddles a narrow
    // sign dip.
    let (a, b, c) = (3.0 * coeffs[3], 2.0 * coeffs[2], coeffs[1]);
    if a.abs() > 0.0 {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for root in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                for nudge in [-1e-9, 1e-9] {
                    let x = root + nudge;
                    if x > x_min && x < x_max {
                        probes.push(x);
                    }
                }
            }
        }
    } else if b.abs() > 0.0 {
        let root = -c / b;
        for nudge in [-1e-9, 1e-9] {
            let x = root + nudge;
            if x > x_min && x < x_max {
                probes.push(x);
            }
        }
    }
    let mut pos = false;
    let mut neg = false;
    for &x in &probes {
        let d = derivative(coeffs, x);
        if d > 0.0 {
            pos = true;
        } else if d < 0.0 {
            neg = true;
        }
        if pos && neg {
            return false;
        }
    }
    true
}

/// Model voltage at a displacement. Extrapolates silently; use
/// [`evaluate_checked`] when the range matters.
pub fn evaluate(model: &CalibrationModel, x_mm: f64) -> f64 {
    let c = &model.coeffs;
    c[0] + x_mm * (c[1] + x_mm * (c[2] + x_mm * c[3]))
}

/// Model voltage plus an extrapolation flag when `x` leaves the calibrated
/// range.
pub fn evaluate_checked(model: &CalibrationModel, x_mm: f64) -> (f64, bool) {
    let (lo, hi) = model.valid_range;
    (evaluate(model, x_mm), x_mm < lo || x_mm > hi)
}

/// Result of a voltage inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub displacement_mm: f64,
    /// The voltage fell outside the calibrated span and the result was
    /// clamped to the range edge. Streams keep running on saturated signals.
    pub saturated: bool,
}

/// Unique displacement with `evaluate(model, x) = v`, by bisection to
/// 1e-9 mm. Out-of-range voltages clamp to the nearest range edge.
pub fn invert(model: &CalibrationModel, v_mv: f64) -> Result<Inversion> {
    if !model.monotone {
        return Err(Error::NonMonotoneModel {
            x_min: model.valid_range.0,
            x_max: model.valid_range.1,
        });
    }
    let (x_min, x_max) = model.valid_range;
    let v_lo_end = evaluate(model, x_min);
    let v_hi_end = evaluate(model, x_max);
    let rising = v_hi_end >= v_lo_end;
    let (v_min, v_max) = if rising {
        (v_lo_end, v_hi_end)
    } else {
        (v_hi_end, v_lo_end)
    };
    if v_mv < v_min {
        return Ok(Inversion {
            displacement_mm: if rising { x_min } else { x_max },
            saturated: true,
        });
    }
    if v_mv > v_max {
        return Ok(Inversion {
            displacement_mm: if rising { x_max } else { x_min },
            saturated: true,
        });
    }

    let (mut lo, mut hi) = (x_min, x_max);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let below = evaluate(model, mid) < v_mv;
        if below == rising {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(Inversion {
        displacement_mm: 0.5 * (lo + hi),
        saturated: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::Branch;

    /// Reference calibration cubic for the demo unit's first sensor.
    pub(crate) const SENSOR_1_COEFFS: [f64; 4] = [1651.9842, 46.4413, -2.6934, -0.36251];
    /// Reference calibration cubic for the demo unit's second sensor.
    pub(crate) const SENSOR_2_COEFFS: [f64; 4] = [1624.5567, 33.37911, -2.3102, -0.14139];

    pub(crate) fn synth_samples(coeffs: &[f64; 4], xs: &[f64]) -> Vec<CalibrationSample> {
        let poly = |x: f64| coeffs[0] + x * (coeffs[1] + x * (coeffs[2] + x * coeffs[3]));
        xs.iter()
            .enumerate()
            .map(|(i, &x)| CalibrationSample {
                t_s: i as f64 * 0.1,
                pressure_kpa: x * 10.0,
                displacement_mm: x,
                v1_mv: poly(x),
                v2_mv: poly(x),
                cycle: 1,
                branch: Branch::Loading,
            })
            .collect()
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn sensor_1_coefficients_round_trip() {
        let samples = synth_samples(&SENSOR_1_COEFFS, &grid(-4.0, 4.0, 19));
        let model = fit_calibration(&samples, SensorId::One).unwrap();
        for (c, e) in model.coeffs.iter().zip(SENSOR_1_COEFFS) {
            assert!((c - e).abs() < 1e-6, "coeff {c} vs {e}");
        }
        assert!(model.r_squared > 1.0 - 1e-12);
        assert!(model.monotone);
    }

    #[test]
    fn sensor_2_coefficients_round_trip() {
        let samples = synth_samples(&SENSOR_2_COEFFS, &grid(-4.0, 4.0, 19));
        let model = fit_calibration(&samples, SensorId::Two).unwrap();
        for (c, e) in model.coeffs.iter().zip(SENSOR_2_COEFFS) {
            assert!((c - e).abs() < 1e-6, "coeff {c} vs {e}");
        }
        assert!(model.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn constant_voltage_flags_degenerate_variance() {
        let mut samples = synth_samples(&SENSOR_1_COEFFS, &grid(-4.0, 4.0, 9));
        for s in &mut samples {
            s.v1_mv = 1500.0;
        }
        let model = fit_calibration(&samples, SensorId::One).unwrap();
        assert_eq!(model.r_squared, 0.0);
        for c in &model.coeffs[1..] {
            assert!(c.abs() < 1e-9);
        }
        assert!(model
            .warnings
            .iter()
            .any(|w| w.contains("degenerate variance")));
    }

    #[test]
    fn evaluate_matches_direct_polynomial() {
        let samples = synth_samples(&SENSOR_1_COEFFS, &grid(-4.0, 4.0, 19));
        let model = fit_calibration(&samples, SensorId::One).unwrap();
        assert!((evaluate(&model, 0.0) - 1651.9842).abs() < 1e-6);
        let expect = 1651.9842 + 46.4413 - 2.6934 - 0.36251;
        assert!((evaluate(&model, 1.0) - expect).abs() < 1e-6);
        assert!((expect - 1695.36959).abs() < 1e-9);

        let samples2 = synth_samples(&SENSOR_2_COEFFS, &grid(-4.0, 4.0, 19));
        let model2 = fit_calibration(&samples2, SensorId::Two).unwrap();
        assert!((evaluate(&model2, 0.0) - 1624.5567).abs() < 1e-6);
    }

    #[test]
    fn invert_recovers_displacement() {
        let samples = synth_samples(&SENSOR_1_COEFFS, &grid(-4.0, 4.0, 19));
        let model = fit_calibration(&samples, SensorId::One).unwrap();
        let at_zero = invert(&model, 1651.9842).unwrap();
        assert!(at_zero.displacement_mm.abs() < 1e-6);
        assert!(!at_zero.saturated);
        let at_one = invert(&model, 1695.36959).unwrap();
        assert!((at_one.displacement_mm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn invert_round_trips_over_monotone_range() {
        let samples = synth_samples(&SENSOR_1_COEFFS, &grid(-4.0, 4.0, 19));
        let model = fit_calibration(&samples, SensorId::One).unwrap();
        for i in 0..=100 {
            let x = -4.0 + 8.0 * i as f64 / 100.0;
            let inv = invert(&model, evaluate(&model, x)).unwrap();
            assert!(
                (inv.displacement_mm - x).abs() < 1e-6,
                "x {x} came back {}",
                inv.displacement_mm
            );
        }
    }

    #[test]
    fn out_of_range_voltage_clamps_with_flag() {
        let samples = synth_samples(&SENSOR_1_COEFFS, &grid(-4.0, 4.0, 19));
        let model = fit_calibration(&samples, SensorId::One).unwrap();
        let high = invert(&model, evaluate(&model, 4.0) + 100.0).unwrap();
        assert!(high.saturated);
        assert!((high.displacement_mm - 4.0).abs() < 1e-12);
        let low = invert(&model, evaluate(&model, -4.0) - 100.0).unwrap();
        assert!(low.saturated);
        assert!((low.displacement_mm + 4.0).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_model_refuses_inversion() {
        // A cubic with a hump inside the sampled range.
        let coeffs = [0.0, -1.0, 0.0, 1.0]; // v = x³ − x
        let samples = synth_samples(&coeffs, &grid(-2.0, 2.0, 21));
        let model = fit_calibration(&samples, SensorId::One).unwrap();
        assert!(!model.monotone);
        assert!(matches!(
            invert(&model, 0.5),
            Err(Error::NonMonotoneModel { .. })
        ));
    }

    #[test]
    fn extrapolation_is_flagged() {
        let samples = synth_samples(&SENSOR_1_COEFFS, &grid(-4.0, 4.0, 19));
        let model = fit_calibration(&samples, SensorId::One).unwrap();
        assert!(!evaluate_checked(&model, 0.0).1);
        assert!(evaluate_checked(&model, 5.0).1);
    }
}
