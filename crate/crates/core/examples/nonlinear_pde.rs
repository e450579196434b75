//! Linear against interacting continuum: the density-dependent mobility
//! slows spreading wherever robots are crowded.

use levy_swarm::harness::continuum_coefficients;
use levy_swarm::metrics::coverage_instantaneous;
use levy_swarm::model::GridSpec;
use levy_swarm::params::ModelParams;
use levy_swarm::pde::{build_initial_condition, evolve, evolve_nonlinear, Scheme};

fn main() -> levy_swarm::Result<()> {
    let params = ModelParams::default();
    let grid: GridSpec = params.pde_grid()?;
    let n = 20;
    let coeffs = continuum_coefficients(1.3, &params)?;
    let u0 = build_initial_condition(n, grid)?;
    for t in [0.5, 1.0, 2.0] {
        let lin = evolve(&u0, &coeffs, t, t, 0.1, Scheme::ExactExp)?.pop().unwrap();
        let non = evolve_nonlinear(&u0, &coeffs, t, 0.1, n as f64)?;
        println!(
            "t = {t:3} s  linear {:.4}  interacting {:.4}",
            coverage_instantaneous(&lin, n as f64),
            coverage_instantaneous(&non, n as f64)
        );
    }
    Ok(())
}
