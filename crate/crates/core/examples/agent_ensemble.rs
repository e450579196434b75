//! Replicate ensemble of point robots: mean coverage and time to half
//! coverage for each exponent.

use levy_swarm::harness::{run_agents, SpreadStat};
use levy_swarm::model::{ExperimentConfig, Mode};
use levy_swarm::params::ModelParams;

fn main() -> levy_swarm::Result<()> {
    let params = ModelParams::default();
    println!("alpha  final mean  final std  t50 mean");
    for alpha in [1.1, 1.3, 1.5, 1.7, 1.9] {
        let mut cfg = ExperimentConfig::reference(20, alpha, Mode::Point);
        cfg.replicates = 10;
        let e = run_agents(&cfg, &params)?;
        let t50 = SpreadStat::of(&e.times_to_coverage(0.5)?);
        let k = e.stats.times.len() - 1;
        println!("{alpha:5}  {:10.4}  {:9.4}  {:8.1}", e.stats.mean[k], e.stats.std[k], t50.mean.unwrap_or(f64::NAN));
    }
    Ok(())
}
