use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::sampling::KineticParams;

/// Measure of the unit circle.
pub const S_ABS: f64 = 2.0 * PI;

/// Constants of the continuum equation for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeCoefficients {
    pub alpha: f64,
    pub sigma0: f64,
    /// Scaled speed `c_n * epsilon^gamma`.
    pub c0: f64,
    pub nu1: f64,
    pub s_abs: f64,
    pub c_alpha: f64,
    pub xi_alpha: f64,
    pub c_hat_alpha: f64,
    /// Diffusivity multiplying the fractional Laplacian (m^alpha / s).
    pub d_eff: f64,
}

/// Normalisation between the averaged directional derivative and the
/// fractional Laplacian in the plane.
pub fn xi_alpha(alpha: f64) -> f64 {
    -2.0 * PI.sqrt() * (PI * alpha / 2.0).cos() * gamma((alpha + 1.0) / 2.0) / gamma((alpha + 2.0) / 2.0)
}

/// Diffusion coefficient of the continuum limit.
pub fn c_alpha(alpha: f64, sigma0: f64, c0: f64, nu1: f64) -> f64 {
    let lead = sigma0.powf(alpha - 2.0) * c0.powf(alpha - 1.0) * (alpha - 1.0).powi(2) * PI
        / ((PI * alpha).sin() * gamma(alpha));
    -lead * (S_ABS - 4.0 * nu1) / (S_ABS * S_ABS)
}

pub fn compute_coefficients(params: &KineticParams, nu1: f64, epsilon: f64, gamma_exp: f64) -> Result<PdeCoefficients> {
    let alpha = params.alpha;
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(invalid("alpha", format!("{alpha} is outside (1, 2)")));
    }
    if !(params.sigma0 > 0.0) {
        return Err(invalid("sigma0", "must be positive"));
    }
    if !(0.0..PI / 2.0).contains(&nu1) {
        return Err(invalid("nu1", format!("{nu1} is outside [0, pi/2)")));
    }
    if !(epsilon > 0.0) {
        return Err(invalid("epsilon", "must be positive"));
    }
    let c0 = params.speed_c * epsilon.powf(gamma_exp);
    Ok(from_c0(alpha, params.sigma0, c0, nu1))
}

pub(crate) fn from_c0(alpha: f64, sigma0: f64, c0: f64, nu1: f64) -> PdeCoefficients {
    let c = c_alpha(alpha, sigma0, c0, nu1);
    let xi = xi_alpha(alpha);
    let c_hat = xi * c;
    PdeCoefficients {
        alpha,
        sigma0,
        c0,
        nu1,
        s_abs: S_ABS,
        c_alpha: c,
        xi_alpha: xi,
        c_hat_alpha: c_hat,
        d_eff: c0 * c_hat,
    }
}

impl PdeCoefficients {
    /// Same point with the diffusivity replaced; `c_hat_alpha` follows so
    /// that `d_eff = c0 * c_hat_alpha` still holds.
    pub fn with_diffusivity(mut self, d_eff: f64) -> Result<Self> {
        if !(d_eff > 0.0 && d_eff.is_finite()) {
            return Err(invalid("diffusivity", format!("must be positive, got {d_eff}")));
        }
        self.d_eff = d_eff;
        self.c_hat_alpha = d_eff / self.c0;
        Ok(self)
    }
}
