//! Simulation of robot swarms searching by Lévy walks, and of the fractional
//! diffusion equation describing their density.
//!
//! The crate has two engines. [`agents`] moves individual robots, either with
//! a rotate-then-drive controller or as a velocity-jump process. [`pde`]
//! evolves the continuum density with a cosine-basis solver. [`metrics`]
//! turns both into coverage curves and hitting times, and [`harness`] runs
//! sweeps and writes comparison tables.

pub mod agents;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod params;
pub mod pde;
pub mod quadrature;
pub mod sampling;

pub use error::{Error, Result};
