//! Individual-robot simulation: the rotate-then-drive controller, the
//! velocity-jump process, wall and robot collisions, and coverage bookkeeping.

mod collision;
mod coverage;
mod world;

pub use collision::{elastic_collision, reflect_wall};
pub use coverage::HitTimeMap;
pub use world::{Phase, RobotState, SimSettings, SimWorld};
