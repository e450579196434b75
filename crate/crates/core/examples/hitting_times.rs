//! Tile hitting times: continuum threshold crossing against the closed-form
//! approximation, five robots.

use levy_swarm::harness::run_pde;
use levy_swarm::model::{ExperimentConfig, Mode};
use levy_swarm::params::ModelParams;

fn main() -> levy_swarm::Result<()> {
    let params = ModelParams::default();
    println!("alpha   tile             pde (s)  analytic (s)");
    for alpha in [1.3, 1.5, 1.7] {
        let mut cfg = ExperimentConfig::reference(5, alpha, Mode::Point);
        cfg.duration_s = 120.0;
        let r = run_pde(&cfg, &params)?;
        for t in &r.tiles {
            println!(
                "{alpha:5}   ({:5.2}, {:4.2})   {:>8}  {:12.4}",
                t.tile.center.x,
                t.tile.center.y,
                t.t0_pde.map_or("-".into(), |v| format!("{v:.3}")),
                t.t0_analytic
            );
        }
    }
    Ok(())
}
