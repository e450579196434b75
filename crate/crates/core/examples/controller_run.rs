//! One replicate of the rotate-then-drive controller; writes the hit map as
//! CSV and PGM into the system temp directory.

use levy_swarm::agents::{SimSettings, SimWorld};
use levy_swarm::model::{reference_ring_diameter, ring_placement, Mode, Vec2};
use levy_swarm::params::ModelParams;

fn main() -> levy_swarm::Result<()> {
    let params = ModelParams::default();
    let settings = SimSettings::from_params(&params, 1.5, Mode::Webots)?;
    let poses = ring_placement(10, reference_ring_diameter(10), Vec2::ZERO)?;
    let mut world = SimWorld::new(settings, &poses, 42, 0)?;
    let series = world.run(600.0, 60.0)?;
    for (t, c) in series.times.iter().zip(&series.values) {
        println!("t = {t:5} s  coverage = {c:.4}");
    }
    let dir = std::env::temp_dir();
    world.hit_map.write_csv(std::fs::File::create(dir.join("controller_hitmap.csv"))?)?;
    world.hit_map.write_pgm(std::fs::File::create(dir.join("controller_hitmap.pgm"))?, 600.0)?;
    println!("hit map written to {}", dir.display());
    Ok(())
}
