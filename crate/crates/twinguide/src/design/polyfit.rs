//! Least-squares cubic fitting of NDR trends.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A fitted cubic with coefficients in ascending degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicFit {
    pub coeffs: [f64; 4],
    pub rmse: f64,
}

impl CubicFit {
    pub fn eval(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        c[0] + x * (c[1] + x * (c[2] + x * c[3]))
    }
}

/// Least-squares cubic through `(xs, ys)` with the root-mean-square residual.
///
/// Exact data (points on a cubic) reproduce with rmse below 1e-9.
pub fn fit_cubic(xs: &[f64], ys: &[f64]) -> Result<CubicFit> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidInput(format!(
            "mismatched inputs: {} xs vs {} ys",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 4 {
        return Err(Error::RankDeficientFit(format!(
            "cubic fit needs at least 4 points, got {}",
            xs.len()
        )));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if sorted.len() < 4 {
        return Err(Error::RankDeficientFit(format!(
            "cubic fit needs 4 distinct abscissas, got {}",
            sorted.len()
        )));
    }

    let n = xs.len();
    let mut vandermonde = DMatrix::zeros(n, 4);
    for (i, &x) in xs.iter().enumerate() {
        let mut p = 1.0;
        for j in 0..4 {
            vandermonde[(i, j)] = p;
            p *= x;
        }
    }
    let rhs = DVector::from_column_slice(ys);
    let svd = vandermonde.clone().svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::RankDeficientFit(e.to_string()))?;
    let coeffs = [sol[0], sol[1], sol[2], sol[3]];

    let fit = CubicFit { coeffs, rmse: 0.0 };
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (fit.eval(x) - y).powi(2))
        .sum();
    Ok(CubicFit {
        coeffs,
        rmse: (ss_res / n as f64).sqrt(),
    })
}
