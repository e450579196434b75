//! Finite-size robots under the velocity-jump process: the closest pair
//! never gets nearer than one diameter.

use levy_swarm::agents::{SimSettings, SimWorld};
use levy_swarm::model::{reference_ring_diameter, ring_placement, Mode, Vec2};
use levy_swarm::params::ModelParams;

fn main() -> levy_swarm::Result<()> {
    let params = ModelParams::default();
    let settings = SimSettings::from_params(&params, 1.3, Mode::Kinetic)?;
    let poses = ring_placement(20, reference_ring_diameter(20), Vec2::ZERO)?;
    let mut world = SimWorld::new(settings, &poses, 5, 0)?;
    let mut closest = f64::INFINITY;
    for _ in 0..(300.0 / settings.dt) as usize {
        world.step()?;
        closest = closest.min(world.min_pair_distance());
    }
    println!("diameter {:.4} m, closest approach {:.4} m", params.robot_diameter_m, closest);
    println!("coverage after {:.0} s: {:.4}", world.clock, world.coverage());
    Ok(())
}
