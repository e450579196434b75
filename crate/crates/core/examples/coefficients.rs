//! Continuum coefficients over the exponent range.

use levy_swarm::harness::continuum_coefficients;
use levy_swarm::params::ModelParams;

fn main() {
    let params = ModelParams::default();
    println!("alpha        C       Xi    C_hat     D_eff");
    for alpha in [1.1, 1.3, 1.5, 1.7, 1.9] {
        let k = continuum_coefficients(alpha, &params).unwrap();
        println!(
            "{alpha:5} {:8.5} {:8.5} {:8.5} {:9.3e}",
            k.c_alpha, k.xi_alpha, k.c_hat_alpha, k.d_eff
        );
    }
}
