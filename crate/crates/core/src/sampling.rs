//! Stochastic primitives of the movement model: stable-law step lengths,
//! power-law run times, turn-angle kernels and the turn operator.

use std::f64::consts::PI;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{open01, wrap_angle, Vec2};
use crate::quadrature::integrate;

/// Kinetic constants of the velocity-jump process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticParams {
    /// Lévy exponent, in (1, 2).
    pub alpha: f64,
    /// Run-time scale of the survival function (s).
    pub sigma0: f64,
    /// Run speed (m/s).
    pub speed_c: f64,
    /// Robot diameter (m).
    pub rho_diam: f64,
    /// Obstacle-detection radius (m).
    pub sensor_range: f64,
}

impl KineticParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(invalid("alpha", format!("{} is outside (1, 2)", self.alpha)));
        }
        if !(self.sigma0 > 0.0) {
            return Err(invalid("sigma0", "must be positive"));
        }
        if !(self.speed_c > 0.0) {
            return Err(invalid("speed_c", "must be positive"));
        }
        if !(self.rho_diam > 0.0) {
            return Err(invalid("rho_diam", "must be positive"));
        }
        if !(self.sensor_range >= 0.5 * self.rho_diam) {
            return Err(invalid("sensor_range", "must be at least half the diameter"));
        }
        Ok(())
    }

    /// Probability that a run lasts longer than `tau`.
    pub fn survival(&self, tau: f64) -> f64 {
        (self.sigma0 / (self.sigma0 + tau)).powf(self.alpha)
    }

    /// Mean run time `sigma0 / (alpha - 1)`.
    pub fn mean_run_time(&self) -> f64 {
        self.sigma0 / (self.alpha - 1.0)
    }
}

/// Distribution of the reorientation angle relative to the current heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TurnKernel {
    Uniform,
    VonMises { kappa: f64 },
    DeterministicPersist,
}

impl Default for TurnKernel {
    fn default() -> Self {
        TurnKernel::Uniform
    }
}

impl TurnKernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TurnKernel::VonMises { kappa } if !(kappa >= 0.0 && kappa.is_finite()) => {
                Err(invalid("kappa", "must be finite and non-negative"))
            }
            _ => Ok(()),
        }
    }

    /// Unnormalised density of the turn angle. `None` for the point mass at 0.
    fn unnormalised(&self, phi: f64) -> Option<f64> {
        match *self {
            TurnKernel::Uniform => Some(1.0),
            // shifted by e^{-kappa} to keep large kappa finite
            TurnKernel::VonMises { kappa } => Some((kappa * (phi.cos() - 1.0)).exp()),
            TurnKernel::DeterministicPersist => None,
        }
    }

    /// Normalised density on `[-pi, pi)`; `None` for the point mass at 0.
    pub fn density(&self, phi: f64) -> Option<f64> {
        let norm = integrate(|p| self.unnormalised(p).unwrap_or(0.0), -PI, PI, 1e-13);
        self.unnormalised(phi).map(|v| v / norm)
    }
}

/// The symmetric stable variate for given uniforms `x1`, `x2` in (0, 1).
pub fn stable_step_from_uniforms(alpha: f64, x1: f64, x2: f64) -> f64 {
    let angle = PI * (x1 - 0.5);
    let expo = -x2.ln();
    (alpha * angle).sin() / angle.cos().powf(1.0 / alpha)
        * ((((1.0 - alpha) * angle).cos()) / expo).powf((1.0 - alpha) / alpha)
}

/// Signed run length from the Chambers–Mallows–Stuck construction.
pub fn sample_stable_step<R: RngCore + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let x1 = open01(rng);
    let x2 = open01(rng);
    stable_step_from_uniforms(alpha, x1, x2)
}

/// Displacement for run length `r` along `theta = pi * x3`, scaled by `scale`
/// meters per stable unit.
pub fn step_vector_from(r: f64, x3: f64, scale: f64) -> Vec2 {
    let theta = PI * x3;
    Vec2::new(scale * r * theta.cos(), scale * r * theta.sin())
}

/// Target displacement of one controller step, in meters.
pub fn sample_step_vector<R: RngCore + ?Sized>(alpha: f64, scale: f64, rng: &mut R) -> Vec2 {
    let r = sample_stable_step(alpha, rng);
    let x3 = open01(rng);
    step_vector_from(r, x3, scale)
}

/// Inverse of the survival function at `u`.
pub fn run_time_from_uniform(params: &KineticParams, u: f64) -> f64 {
    params.sigma0 * (u.powf(-1.0 / params.alpha) - 1.0)
}

pub fn sample_run_time<R: RngCore + ?Sized>(params: &KineticParams, rng: &mut R) -> f64 {
    run_time_from_uniform(params, open01(rng))
}

/// Hazard rate of stopping after running for `tau`.
pub fn stopping_rate(params: &KineticParams, tau: f64) -> f64 {
    params.alpha / (params.sigma0 + tau)
}

/// Best–Fisher rejection sampler for a von Mises angle centred at zero.
fn sample_von_mises<R: RngCore + ?Sized>(kappa: f64, rng: &mut R) -> f64 {
    if kappa < 1e-8 {
        return -PI + 2.0 * PI * open01(rng);
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1 = open01(rng);
        let u2 = open01(rng);
        let u3 = open01(rng);
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let phi = f.clamp(-1.0, 1.0).acos();
            return if u3 > 0.5 { phi } else { -phi };
        }
    }
}

/// Draws a new heading `theta + phi` with `phi` from the kernel.
pub fn sample_turn<R: RngCore + ?Sized>(kernel: &TurnKernel, theta: f64, rng: &mut R) -> f64 {
    let phi = match *kernel {
        TurnKernel::Uniform => -PI + 2.0 * PI * open01(rng),
        TurnKernel::VonMises { kappa } => sample_von_mises(kappa, rng),
        TurnKernel::DeterministicPersist => 0.0,
    };
    wrap_angle(theta + phi)
}

/// First cosine moment of the turn kernel.
pub fn kernel_nu1(kernel: &TurnKernel) -> f64 {
    match *kernel {
        TurnKernel::Uniform => 0.0,
        TurnKernel::DeterministicPersist => 1.0,
        TurnKernel::VonMises { .. } => {
            let num = integrate(
                |p| kernel.unnormalised(p).unwrap_or(0.0) * p.cos(),
                -PI,
                PI,
                1e-12,
            );
            let den = integrate(|p| kernel.unnormalised(p).unwrap_or(0.0), -PI, PI, 1e-12);
            num / den
        }
    }
}

/// Discrete turn-kernel weights on an `m`-point angular grid; they sum to one.
fn kernel_weights(kernel: &TurnKernel, m: usize) -> Vec<f64> {
    match *kernel {
        TurnKernel::DeterministicPersist => {
            let mut w = vec![0.0; m];
            w[0] = 1.0;
            w
        }
        _ => {
            let raw: Vec<f64> = (0..m)
                .map(|d| {
                    let phi = wrap_angle(2.0 * PI * d as f64 / m as f64);
                    kernel.unnormalised(phi).unwrap_or(0.0)
                })
                .collect();
            let total: f64 = raw.iter().sum();
            raw.into_iter().map(|v| v / total).collect()
        }
    }
}

/// Applies the turn operator (circular convolution with the kernel) to a
/// density sampled on `m >= 8` equally spaced headings `2 pi k / m`.
pub fn apply_turn_operator(kernel: &TurnKernel, density: &[f64]) -> Result<Vec<f64>> {
    let m = density.len();
    if m < 8 {
        return Err(invalid("density", format!("need at least 8 angular samples, got {m}")));
    }
    if let Some((index, &value)) = density.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::NegativeDensity { index, value });
    }
    let w = kernel_weights(kernel, m);
    Ok((0..m)
        .map(|n| {
            density
                .iter()
                .enumerate()
                .map(|(k, f)| w[(n + m - k) % m] * f)
                .sum()
        })
        .collect())
}
