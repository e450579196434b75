//! Agents against the continuum at one sweep point, with the diffusivity
//! fitted on a separate ensemble. Writes the report under the temp dir.

use levy_swarm::harness::{compare, SweepSpec};
use levy_swarm::model::{ExperimentConfig, Mode};
use levy_swarm::params::{Calibration, ModelParams};

fn main() -> levy_swarm::Result<()> {
    let params = ModelParams {
        calibration: Calibration::Fit { replicates: 10 },
        ..ModelParams::default()
    };
    let mut base = ExperimentConfig::reference(20, 1.3, Mode::Point);
    base.replicates = 10;
    base.duration_s = 600.0;
    let sweep = SweepSpec { n_values: vec![20], alpha_values: vec![1.3], base };
    let report = compare(&sweep, &params)?;
    print!("{}", report.summary_text());
    let out = std::env::temp_dir().join("levy_compare");
    report.write_outputs(&out)?;
    println!("written to {}", out.display());
    Ok(())
}
