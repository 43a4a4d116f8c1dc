//! Snell refraction and unpolarized Fresnel power splitting at a dielectric
//! interface.

use serde::{Deserialize, Serialize};

/// Outcome of one interface event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Interface {
    /// Partial reflection and refraction. `reflectance + transmittance = 1`.
    Split {
        reflectance: f64,
        transmittance: f64,
        /// Refraction angle from the normal, radians.
        refraction_angle: f64,
    },
    /// Total internal reflection: all power stays in the incident medium.
    TotalInternal,
}

impl Interface {
    pub fn reflectance(&self) -> f64 {
        match self {
            Interface::Split { reflectance, .. } => *reflectance,
            Interface::TotalInternal => 1.0,
        }
    }

    pub fn transmittance(&self) -> f64 {
        match self {
            Interface::Split { transmittance, .. } => *transmittance,
            Interface::TotalInternal => 0.0,
        }
    }

    pub fn is_total_internal(&self) -> bool {
        matches!(self, Interface::TotalInternal)
    }
}

/// Critical angle for total internal reflection going from `n1` into `n2`,
/// or `None` when the ray heads into the denser medium.
pub fn critical_angle(n1: f64, n2: f64) -> Option<f64> {
    if n1 > n2 {
        Some((n2 / n1).asin())
    } else {
        None
    }
}

/// Unpolarized Fresnel coefficients for a ray crossing from `n1` into `n2` at
/// `incidence` radians from the surface normal.
///
/// The reflectance is the mean of the s- and p-polarized reflectances, and
/// the transmittance is its exact complement. Grazing incidence (θ → π/2)
/// limits to full reflection.
pub fn fresnel(n1: f64, n2: f64, incidence: f64) -> Interface {
    debug_assert!(n1 > 0.0 && n2 > 0.0);
    debug_assert!((0.0..std::f64::consts::FRAC_PI_2 + 1e-12).contains(&incidence));
    let cos_i = incidence.cos();
    let sin_i = incidence.sin();
    let sin_t = n1 / n2 * sin_i;
    if sin_t >= 1.0 {
        return Interface::TotalInternal;
    }
    let cos_t = (1.0 - sin_t * sin_t).sqrt();
    let rs = ((n1 * cos_i - n2 * cos_t) / (n1 * cos_i + n2 * cos_t)).powi(2);
    let rp = ((n1 * cos_t - n2 * cos_i) / (n1 * cos_t + n2 * cos_i)).powi(2);
    let reflectance = 0.5 * (rs + rp);
    Interface::Split {
        reflectance,
        transmittance: 1.0 - reflectance,
        refraction_angle: sin_t.asin(),
    }
}

/// Fresnel split from direction cosines, the form the tracer uses. `cos_i`
/// and `cos_t` are the incidence/refraction cosines, both positive.
pub(crate) fn reflectance_from_cosines(n1: f64, n2: f64, cos_i: f64, cos_t: f64) -> f64 {
    let rs = ((n1 * cos_i - n2 * cos_t) / (n1 * cos_i + n2 * cos_t)).powi(2);
    let rp = ((n1 * cos_t - n2 * cos_i) / (n1 * cos_t + n2 * cos_i)).powi(2);
    0.5 * (rs + rp)
}
