//! Pressure-driven nominal displacement model.
//!
//! The reference behavior is a monotone piecewise-linear table fitted from
//! calibration logs: the mean measured displacement at each pressure
//! setpoint. The shadow compares live estimates against it to produce the
//! deviation signal.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calibration::CalibrationSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NominalModel {
    /// (pressure kPa, displacement mm), pressure ascending, displacement
    /// non-decreasing.
    pub points: Vec<(f64, f64)>,
    /// Set when fitting had to lift displacements to restore monotonicity.
    pub monotonicity_adjusted: bool,
}

impl NominalModel {
    pub fn from_table(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(
                "nominal model needs at least 2 pressure points".into(),
            ));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in points.windows(2) {
            if w[1].0 - w[0].0 < 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "duplicate nominal pressure setpoint {}",
                    w[0].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidInput(format!(
                    "nominal displacement must be non-decreasing in pressure \
                     (violated between {} and {} kPa)",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self {
            points,
            monotonicity_adjusted: false,
        })
    }

    /// Mean displacement per pressure setpoint across a calibration log.
    /// Small non-monotone dips (hysteresis noise) are lifted to the running
    /// maximum and flagged.
    pub fn fit_from_samples(samples: &[CalibrationSample]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidInput("no samples for nominal model".into()));
        }
        let mut bins: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
        for s in samples {
            // Bin pressures at 0.001 kPa so repeated setpoints pool exactly.
            let key = (s.pressure_kpa * 1000.0).round() as i64;
            let e = bins.entry(key).or_insert((0.0, 0));
            e.0 += s.displacement_mm;
            e.1 += 1;
        }
        if bins.len() < 2 {
            return Err(Error::InvalidInput(
                "nominal model needs at least 2 distinct pressure setpoints".into(),
            ));
        }
        let mut adjusted = false;
        let mut running = f64::NEG_INFINITY;
        let points = bins
            .into_iter()
            .map(|(k, (sum, n))| {
                let mut d = sum / n as f64;
                if d < running {
                    d = running;
                    adjusted = true;
                } else {
                    running = d;
                }
                (k as f64 / 1000.0, d)
            })
            .collect();
        Ok(Self {
            points,
            monotonicity_adjusted: adjusted,
        })
    }

    /// Nominal displacement at a pressure, clamped to the table edges.
    pub fn displacement_at(&self, pressure_kpa: f64) -> f64 {
        let pts = &self.points;
        if pressure_kpa <= pts[0].0 {
            return pts[0].1;
        }
        if pressure_kpa >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let i = pts.partition_point(|p| p.0 < pressure_kpa);
        let (p0, d0) = pts[i - 1];
        let (p1, d1) = pts[i];
        d0 + (d1 - d0) * (pressure_kpa - p0) / (p1 - p0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("nominal model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::Branch;

    #[test]
    fn interpolates_and_clamps() {
        let model = NominalModel::from_table(vec![(-40.0, -3.0), (0.0, 0.0), (50.0, 5.0)]).unwrap();
        assert_eq!(model.displacement_at(0.0), 0.0);
        assert!((model.displacement_at(25.0) - 2.5).abs() < 1e-12);
        assert_eq!(model.displacement_at(-100.0), -3.0);
        assert_eq!(model.displacement_at(100.0), 5.0);
    }

    #[test]
    fn fit_pools_repeated_setpoints() {
        let mut samples = Vec::new();
        for (p, d) in [(0.0, 0.1), (0.0, 0.3), (10.0, 1.0), (10.0, 1.2)] {
            samples.push(CalibrationSample {
                t_s: samples.len() as f64,
                pressure_kpa: p,
                displacement_mm: d,
                v1_mv: 0.0,
                v2_mv: 0.0,
                cycle: 1,
                branch: Branch::Loading,
            });
        }
        let model = NominalModel::fit_from_samples(&samples).unwrap();
        assert_eq!(model.points.len(), 2);
        assert!((model.points[0].1 - 0.2).abs() < 1e-12);
        assert!((model.points[1].1 - 1.1).abs() < 1e-12);
        assert!(!model.monotonicity_adjusted);
    }

    #[test]
    fn non_monotone_table_rejected_but_fit_lifts() {
        assert!(NominalModel::from_table(vec![(0.0, 1.0), (10.0, 0.5)]).is_err());
        let samples: Vec<CalibrationSample> = [(0.0, 1.0), (10.0, 0.5)]
            .iter()
            .map(|&(p, d)| CalibrationSample {
                t_s: p,
                pressure_kpa: p,
                displacement_mm: d,
                v1_mv: 0.0,
                v2_mv: 0.0,
                cycle: 1,
                branch: Branch::Loading,
            })
            .collect();
        let model = NominalModel::fit_from_samples(&samples).unwrap();
        assert!(model.monotonicity_adjusted);
        assert_eq!(model.points[1].1, 1.0);
    }
}
