//! Cubic spline interpolation and arc-length resampling of centerlines.
//!
//! Centerlines are reconstructed with a not-a-knot cubic interpolating spline
//! (the common "interpolation curve" default), parameterized by chord length
//! and re-parameterized by arc length with adaptive Simpson quadrature at
//! 1e-9 relative tolerance.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{cumulative_arc_length, Point2, Vec2};

/// One-dimensional cubic interpolating spline with not-a-knot end conditions.
///
/// Not-a-knot reproduces any polynomial up to degree three exactly, which is
/// what the centerline tests rely on (lines and parabolas round-trip).
#[derive(Debug, Clone)]
pub struct CubicSpline1 {
    t: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline1 {
    pub fn new(t: &[f64], y: &[f64]) -> Result<Self> {
        let n = t.len();
        if n < 2 || y.len() != n {
            return Err(Error::InvalidInput(format!(
                "spline needs matching knot/value lists of length >= 2, got {} and {}",
                n,
                y.len()
            )));
        }
        for w in t.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidInput(
                    "spline knots must be strictly increasing".into(),
                ));
            }
        }
        let m = match n {
            2 => vec![0.0; 2],
            3 => {
                // Three points determine a single parabola; its second
                // derivative is constant.
                let h0 = t[1] - t[0];
                let h1 = t[2] - t[1];
                let d0 = (y[1] - y[0]) / h0;
                let d1 = (y[2] - y[1]) / h1;
                let ypp = 2.0 * (d1 - d0) / (h0 + h1);
                vec![ypp; 3]
            }
            _ => solve_not_a_knot(t, y),
        };
        Ok(Self {
            t: t.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    fn interval(&self, x: f64) -> usize {
        let n = self.t.len();
        match self.t.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - x) / h;
        let b = (x - self.t[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.interval(x);
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - x) / h;
        let b = (x - self.t[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }
}

/// Second derivatives for a not-a-knot spline, n >= 4.
fn solve_not_a_knot(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let mut a = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    // Continuity of the third derivative across the first and last interior knots.
    a[(0, 0)] = h[1];
    a[(0, 1)] = -(h[0] + h[1]);
    a[(0, 2)] = h[0];
    a[(n - 1, n - 3)] = h[n - 2];
    a[(n - 1, n - 2)] = -(h[n - 3] + h[n - 2]);
    a[(n - 1, n - 1)] = h[n - 3];
    for i in 1..n - 1 {
        a[(i, i - 1)] = h[i - 1];
        a[(i, i)] = 2.0 * (h[i - 1] + h[i]);
        a[(i, i + 1)] = h[i];
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    let lu = a.lu();
    let m = lu.solve(&rhs).expect("not-a-knot system is nonsingular");
    m.iter().copied().collect()
}

/// A planar curve through 2D points: separate splines for x and z over a
/// chord-length parameter, with a cached arc-length table for
/// re-parameterization.
#[derive(Debug, Clone)]
pub struct CurveSpline {
    sx: CubicSpline1,
    sz: CubicSpline1,
    knots: Vec<f64>,
    /// Cumulative arc length at each knot, by adaptive Simpson.
    arc_at_knot: Vec<f64>,
}

const SIMPSON_REL_TOL: f64 = 1e-9;

impl CurveSpline {
    pub fn through(points: &[Point2]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "curve interpolation needs at least 3 points, got {}",
                points.len()
            )));
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0].distance(w[1]) < 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "coincident consecutive points at indices {i} and {}",
                    i + 1
                )));
            }
        }
        let knots = cumulative_arc_length(points);
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let zs: Vec<f64> = points.iter().map(|p| p.z).collect();
        let sx = CubicSpline1::new(&knots, &xs)?;
        let sz = CubicSpline1::new(&knots, &zs)?;

        let mut arc_at_knot = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        arc_at_knot.push(0.0);
        for w in knots.windows(2) {
            acc += adaptive_simpson(
                &|t| speed(&sx, &sz, t),
                w[0],
                w[1],
                SIMPSON_REL_TOL * (w[1] - w[0]).max(1e-12),
            );
            arc_at_knot.push(acc);
        }
        Ok(Self {
            sx,
            sz,
            knots,
            arc_at_knot,
        })
    }

    pub fn point_at_param(&self, t: f64) -> Point2 {
        Point2::new(self.sx.eval(t), self.sz.eval(t))
    }

    pub fn tangent_at_param(&self, t: f64) -> Vec2 {
        Point2::new(self.sx.deriv(t), self.sz.deriv(t))
    }

    pub fn total_arc_length(&self) -> f64 {
        *self.arc_at_knot.last().unwrap()
    }

    /// Parameter value at a given arc length, by Newton iterations bracketed
    /// inside the owning knot interval.
    pub fn param_at_arc_length(&self, s: f64) -> f64 {
        let total = self.total_arc_length();
        let s = s.clamp(0.0, total);
        let i = match self.arc_at_knot.binary_search_by(|v| v.total_cmp(&s)) {
            Ok(i) => return self.knots[i.min(self.knots.len() - 1)],
            Err(i) => i.saturating_sub(1).min(self.knots.len() - 2),
        };
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let (mut lo, mut hi) = (t0, t1);
        let target = s - self.arc_at_knot[i];
        let mut t = t0 + (t1 - t0) * target / (self.arc_at_knot[i + 1] - self.arc_at_knot[i]);
        for _ in 0..60 {
            let f = adaptive_simpson(
                &|u| speed(&self.sx, &self.sz, u),
                t0,
                t,
                SIMPSON_REL_TOL * (t1 - t0).max(1e-12),
            ) - target;
            if f.abs() < 1e-12 * total.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = speed(&self.sx, &self.sz, t);
            let next = t - f / d;
            t = if next > lo && next < hi {
                next
            } else {
                (lo + hi) / 2.0
            };
            if hi - lo < 1e-14 {
                break;
            }
        }
        t
    }

    pub fn point_at_arc_length(&self, s: f64) -> Point2 {
        self.point_at_param(self.param_at_arc_length(s))
    }
}

fn speed(sx: &CubicSpline1, sz: &CubicSpline1, t: f64) -> f64 {
    sx.deriv(t).hypot(sz.deriv(t))
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) / 2.0;
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 24)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = (a + b) / 2.0;
    let lm = (a + m) / 2.0;
    let rm = (m + b) / 2.0;
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Reconstruct a centerline through raw tracked points and return `n_out`
/// points equally spaced in arc length.
///
/// With `n_out` equal to the raw count the raw points are returned as-is,
/// preserving their own arc spacing.
pub fn interpolate_centerline(raw: &[Point2], n_out: usize) -> Result<Vec<Point2>> {
    if n_out < raw.len() {
        return Err(Error::InvalidInput(format!(
            "n_out ({n_out}) must be at least the raw point count ({})",
            raw.len()
        )));
    }
    if n_out == raw.len() {
        // Knot identity: the spline passes through every raw point, so
        // re-emitting them is the exact answer.
        for (i, w) in raw.windows(2).enumerate() {
            if w[0].distance(w[1]) < 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "coincident consecutive points at indices {i} and {}",
                    i + 1
                )));
            }
        }
        return Ok(raw.to_vec());
    }
    let curve = CurveSpline::through(raw)?;
    let total = curve.total_arc_length();
    let out = (0..n_out)
        .map(|j| {
            let s = total * j as f64 / (n_out - 1) as f64;
            curve.point_at_arc_length(s)
        })
        .collect();
    Ok(out)
}

/// Resample a piecewise-linear centerline at arc-length multiples of
/// `interval`, keeping the first and last points.
pub fn resample(centerline: &[Point2], interval: f64) -> Result<Vec<Point2>> {
    if interval <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "resample interval must be positive, got {interval}"
        )));
    }
    if centerline.len() < 2 {
        return Err(Error::InvalidInput(
            "resample needs at least 2 points".into(),
        ));
    }
    let arc = cumulative_arc_length(centerline);
    let total = *arc.last().unwrap();
    if interval > total {
        return Err(Error::InvalidInput(format!(
            "interval {interval} mm exceeds total arc length {total:.6} mm"
        )));
    }
    let mut out = Vec::new();
    let mut seg = 0usize;
    let steps = (total / interval).floor() as usize;
    for k in 0..=steps {
        let s = k as f64 * interval;
        while seg + 2 < arc.len() && arc[seg + 1] < s {
            seg += 1;
        }
        let span = arc[seg + 1] - arc[seg];
        let t = if span > 0.0 {
            (s - arc[seg]) / span
        } else {
            0.0
        };
        out.push(Point2::new(
            centerline[seg].x + t * (centerline[seg + 1].x - centerline[seg].x),
            centerline[seg].z + t * (centerline[seg + 1].z - centerline[seg].z),
        ));
    }
    let last = *centerline.last().unwrap();
    if out.last().map(|p| p.distance(last) > 1e-9).unwrap_or(true) {
        out.push(last);
    } else {
        *out.last_mut().unwrap() = last;
    }
    Ok(out)
}
