//! Turn kernels: their first cosine moment and the discrete turn operator.

use levy_swarm::sampling::{apply_turn_operator, kernel_nu1, TurnKernel};

fn main() {
    let m = 256;
    let density: Vec<f64> = (0..m)
        .map(|k| 1.0 + 0.5 * (2.0 * std::f64::consts::PI * k as f64 / m as f64).cos())
        .collect();
    let mass: f64 = density.iter().sum();
    for kernel in [TurnKernel::Uniform, TurnKernel::VonMises { kappa: 1.0 }, TurnKernel::VonMises { kappa: 8.0 }, TurnKernel::DeterministicPersist] {
        let out = apply_turn_operator(&kernel, &density).unwrap();
        let amp_in = density[0] - mass / m as f64;
        let amp_out = out[0] - out.iter().sum::<f64>() / m as f64;
        println!(
            "{kernel:?}: nu1 = {:.6}, cos-mode gain = {:.6}, mass drift = {:.1e}",
            kernel_nu1(&kernel),
            amp_out / amp_in,
            out.iter().sum::<f64>() - mass
        );
    }
}
