use std::f64::consts::PI;

use levy_swarm::model::RngStream;
use levy_swarm::quadrature::integrate;
use levy_swarm::sampling::{
    sample_run_time, sample_stable_step, sample_step_vector, sample_turn, KineticParams, TurnKernel,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn chi2_critical(dof: usize) -> f64 {
    ChiSquared::new(dof as f64).unwrap().inverse_cdf(0.999)
}

fn chi2(counts: &[usize], probs: &[f64], n: usize) -> f64 {
    counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = p * n as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum()
}

#[test]
fn step_directions_are_uniform() {
    let (n, bins) = (100_000, 36);
    let mut rng = RngStream::new(3, 0, 0);
    let mut counts = vec![0; bins];
    for _ in 0..n {
        let v = sample_step_vector(1.5, 0.05, &mut rng);
        let a = v.angle().rem_euclid(2.0 * PI);
        counts[((a / (2.0 * PI) * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let stat = chi2(&counts, &vec![1.0 / bins as f64; bins], n);
    assert!(stat < chi2_critical(bins - 1), "{stat}");
}

#[test]
fn von_mises_turns_follow_kernel() {
    let kappa = 2.0;
    let kernel = TurnKernel::VonMises { kappa };
    let (n, bins) = (100_000, 40);
    let mut rng = RngStream::new(4, 0, 0);
    let mut counts = vec![0; bins];
    for _ in 0..n {
        let phi = sample_turn(&kernel, 0.0, &mut rng);
        counts[(((phi + PI) / (2.0 * PI) * bins as f64) as usize).min(bins - 1)] += 1;
    }
    let probs: Vec<f64> = (0..bins)
        .map(|b| {
            let lo = -PI + 2.0 * PI * b as f64 / bins as f64;
            integrate(|p| kernel.density(p).unwrap(), lo, lo + 2.0 * PI / bins as f64, 1e-12)
        })
        .collect();
    assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    let stat = chi2(&counts, &probs, n);
    assert!(stat < chi2_critical(bins - 1), "{stat}");
}

#[test]
fn run_time_quantiles_match_survival() {
    for alpha in [1.1, 1.5, 1.9] {
        let p = KineticParams { alpha, sigma0: 2.0, speed_c: 0.0644, rho_diam: 0.075, sensor_range: 0.06 };
        let n = 200_000;
        let mut rng = RngStream::new(5, 0, 0);
        let mut tau: Vec<f64> = (0..n).map(|_| sample_run_time(&p, &mut rng)).collect();
        tau.sort_by(f64::total_cmp);
        // Kolmogorov distance against the exact law
        let d = tau
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let cdf = 1.0 - p.survival(t);
                (cdf - k as f64 / n as f64).abs().max((cdf - (k + 1) as f64 / n as f64).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.95 / (n as f64).sqrt(), "alpha {alpha}: {d}");
    }
}

#[test]
fn stable_steps_are_symmetric() {
    let n = 100_000;
    let mut rng = RngStream::new(6, 0, 0);
    let positive = (0..n).filter(|_| sample_stable_step(1.3, &mut rng) > 0.0).count();
    let se = (0.25 / n as f64).sqrt();
    assert!((positive as f64 / n as f64 - 0.5).abs() < 4.0 * se);
}
