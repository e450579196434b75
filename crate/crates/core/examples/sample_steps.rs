//! Draws stable step lengths and power-law run times and prints tail
//! estimates next to the exponent that generated them.

use levy_swarm::model::RngStream;
use levy_swarm::sampling::{sample_run_time, sample_stable_step, KineticParams};

fn hill(mut xs: Vec<f64>, k: usize) -> f64 {
    xs.sort_by(|a, b| b.total_cmp(a));
    let tail = xs[k].ln();
    k as f64 / xs[..k].iter().map(|x| x.ln() - tail).sum::<f64>()
}

fn main() {
    let n = 200_000;
    println!("alpha  hill(|r|)  hill(tau)  mean tau");
    for alpha in [1.1, 1.3, 1.5, 1.7, 1.9] {
        let params = KineticParams { alpha, sigma0: 1.0, speed_c: 0.0644, rho_diam: 0.075, sensor_range: 0.06 };
        let mut rng = RngStream::new(7, 0, 0);
        let r: Vec<f64> = (0..n).map(|_| sample_stable_step(alpha, &mut rng).abs()).collect();
        let tau: Vec<f64> = (0..n).map(|_| sample_run_time(&params, &mut rng)).collect();
        let mean = tau.iter().sum::<f64>() / n as f64;
        println!("{alpha:5}  {:9.3}  {:9.3}  {mean:8.2}", hill(r, n / 200), hill(tau, n / 200));
    }
}
