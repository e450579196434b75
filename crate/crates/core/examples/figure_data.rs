//! Every figure data set for a small sweep.

use levy_swarm::harness::{compare, emit_figure_data, Figure, SweepSpec};
use levy_swarm::model::{ExperimentConfig, Mode};
use levy_swarm::params::ModelParams;

fn main() -> levy_swarm::Result<()> {
    let mut base = ExperimentConfig::reference(5, 1.3, Mode::Point);
    base.replicates = 5;
    base.duration_s = 120.0;
    let sweep = SweepSpec { n_values: vec![5, 20], alpha_values: vec![1.3, 1.7], base };
    let report = compare(&sweep, &ModelParams::default())?;
    let out = std::env::temp_dir().join("levy_figures");
    for which in Figure::ALL {
        for path in emit_figure_data(&report, which, &out)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}
