//! Continuum coverage for 20 robots at each exponent.

use levy_swarm::harness::run_pde;
use levy_swarm::metrics::time_to_coverage;
use levy_swarm::model::{ExperimentConfig, Mode};
use levy_swarm::params::ModelParams;

fn main() -> levy_swarm::Result<()> {
    let params = ModelParams::default();
    println!("alpha      D_eff  cov(10 s)  cov(60 s)  final  t50");
    for alpha in [1.1, 1.3, 1.5, 1.7, 1.9] {
        let mut cfg = ExperimentConfig::reference(20, alpha, Mode::Point);
        cfg.duration_s = 300.0;
        let r = run_pde(&cfg, &params)?;
        let t50 = time_to_coverage(&r.coverage, 0.5)?;
        println!(
            "{alpha:5} {:10.3e}  {:9.4}  {:9.4}  {:.4}  {:?}",
            r.coeffs.d_eff,
            r.coverage.values[10],
            r.coverage.values[60],
            r.coverage.last().unwrap_or(0.0),
            t50
        );
    }
    Ok(())
}
