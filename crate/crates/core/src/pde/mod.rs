//! Continuum model: coefficient formulas, the initial density and a
//! cosine-basis solver for the fractional diffusion equation with
//! reflecting walls.

mod coefficients;
mod field;
mod spectral;

pub use coefficients::{c_alpha, compute_coefficients, xi_alpha, PdeCoefficients, S_ABS};
#[allow(unused_imports)]
pub(crate) use coefficients::from_c0;
pub use field::{build_initial_condition, build_spread_initial_condition, DensityField};
pub use spectral::{
    evolve, evolve_nonlinear, spectral_operator, step_density, EvolveReport, InteractionTerm, Scheme, SpectralSolver,
    StepReport,
};
