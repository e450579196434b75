//! Density snapshots written as CSV and as the flat binary format, then
//! read back.

use levy_swarm::model::{Arena, GridSpec};
use levy_swarm::harness::continuum_coefficients;
use levy_swarm::params::ModelParams;
use levy_swarm::pde::{build_initial_condition, evolve, DensityField, Scheme};

fn main() -> levy_swarm::Result<()> {
    let grid = GridSpec::with_counts(Arena::reference(), 128, 156)?;
    let u0 = build_initial_condition(10, grid)?;
    let coeffs = continuum_coefficients(1.5, &ModelParams::default())?;
    let snaps = evolve(&u0, &coeffs, 30.0, 10.0, 0.1, Scheme::ExactExp)?;
    let dir = std::env::temp_dir();
    for s in &snaps {
        let path = dir.join(format!("density_t{}.ufld", s.time));
        s.write_binary(std::fs::File::create(&path)?)?;
        let back = DensityField::read_binary(grid, std::fs::File::open(&path)?)?;
        println!("t = {:4} s  mass {:.12}  max {:.3}  {}", s.time, back.mass(), back.max(), path.display());
    }
    snaps[0].write_csv(std::fs::File::create(dir.join("density_t10.csv"))?)?;
    Ok(())
}
