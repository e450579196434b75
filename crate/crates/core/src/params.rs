//! Physical and numerical parameters shared by both engines.
//!
//! Everything here has a default taken from the reference robot setup, so an
//! empty JSON object is a valid parameter file.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metrics::TargetTile;
use crate::model::{Arena, GridSpec, Mode, Vec2};
use crate::pde::Scheme;
use crate::sampling::{KineticParams, TurnKernel};

/// How the kinetic speed numeral enters the continuum coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedFrame {
    /// The numeral (3, nominally cm/s) is used as-is in the meter-scaled arena.
    Nominal,
    /// The numeral is converted from cm/s to m/s before use.
    Si,
}

/// Which density the continuum metrics threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityScale {
    /// The unit-mass probability density itself.
    Unit,
    /// Expected robot count per area, `N * u`.
    RobotCount,
}

/// How `compare` obtains the continuum diffusivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Calibration {
    /// Use `c0 * C_hat` from the coefficient formulas.
    Formula,
    /// Use this diffusivity (m^alpha / s) directly.
    Fixed { diffusivity: f64 },
    /// Fit the diffusivity to the agent mean coverage of a held-out ensemble
    /// of the given size.
    Fit { replicates: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Straight-line speed of the robots (m/s).
    pub agent_speed_m_s: f64,
    /// On-the-spot rotation speed in the controller (rad/s).
    pub rotation_speed_rad_s: f64,
    pub robot_diameter_m: f64,
    pub sensor_range_m: f64,
    /// Meters per unit of the stable step length.
    pub step_scale_m: f64,
    pub sigma0_s: f64,
    pub turn_kernel: TurnKernel,
    /// Agent tick length (s).
    pub dt_s: f64,
    /// Coverage grid cell side (m).
    pub cell_size_m: f64,

    /// Kinetic speed numeral of the continuum calibration (nominally cm/s).
    pub kinetic_speed: f64,
    pub speed_frame: SpeedFrame,
    pub epsilon: f64,
    pub gamma: f64,

    pub pde_nx: usize,
    pub pde_ny: usize,
    pub pde_dt_s: f64,
    pub pde_scheme: Scheme,
    pub density_scale: DensityScale,
    pub calibration: Calibration,

    /// Hitting-time threshold on the expected tile occupancy.
    pub delta: f64,
    pub tiles: Vec<TargetTile>,
    /// Record the PDE-side per-cell hit map.
    pub pde_hitmap: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            agent_speed_m_s: 0.0644,
            rotation_speed_rad_s: 0.858,
            robot_diameter_m: 0.075,
            sensor_range_m: 0.06,
            step_scale_m: 0.05,
            sigma0_s: 1.0,
            turn_kernel: TurnKernel::Uniform,
            dt_s: 0.05,
            cell_size_m: 0.01,
            kinetic_speed: 3.0,
            speed_frame: SpeedFrame::Nominal,
            epsilon: 0.005,
            gamma: 0.5,
            pde_nx: 128,
            pde_ny: 156,
            pde_dt_s: 0.1,
            pde_scheme: Scheme::ExactExp,
            density_scale: DensityScale::RobotCount,
            calibration: Calibration::Formula,
            delta: 0.01,
            tiles: TargetTile::reference_tiles().to_vec(),
            pde_hitmap: false,
        }
    }
}

impl ModelParams {
    pub fn from_json(text: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(text)?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("agent_speed_m_s", self.agent_speed_m_s),
            ("rotation_speed_rad_s", self.rotation_speed_rad_s),
            ("robot_diameter_m", self.robot_diameter_m),
            ("step_scale_m", self.step_scale_m),
            ("sigma0_s", self.sigma0_s),
            ("dt_s", self.dt_s),
            ("cell_size_m", self.cell_size_m),
            ("kinetic_speed", self.kinetic_speed),
            ("epsilon", self.epsilon),
            ("gamma", self.gamma),
            ("pde_dt_s", self.pde_dt_s),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be positive, got {v}")));
            }
        }
        if self.pde_nx < 2 || self.pde_ny < 2 {
            return Err(invalid("pde_nx/pde_ny", "need at least 2 cells per axis"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta", "must lie in (0, 1)"));
        }
        self.turn_kernel.validate()
    }

    pub fn arena(&self) -> Arena {
        Arena::reference()
    }

    pub fn coverage_grid(&self) -> Result<GridSpec> {
        GridSpec::with_cell_size(self.arena(), self.cell_size_m)
    }

    pub fn pde_grid(&self) -> Result<GridSpec> {
        GridSpec::with_counts(self.arena(), self.pde_nx, self.pde_ny)
    }

    /// Kinetic constants of the robots themselves.
    pub fn agent_kinetics(&self, alpha: f64, mode: Mode) -> KineticParams {
        let rho = match mode {
            // a vanishing diameter keeps the parameter invariants intact
            Mode::Point => 1e-9,
            _ => self.robot_diameter_m,
        };
        KineticParams {
            alpha,
            sigma0: self.sigma0_s,
            speed_c: self.agent_speed_m_s,
            rho_diam: rho,
            sensor_range: self.sensor_range_m.max(0.5 * rho),
        }
    }

    /// Kinetic constants entering the continuum coefficients.
    pub fn continuum_kinetics(&self, alpha: f64) -> KineticParams {
        let speed = match self.speed_frame {
            SpeedFrame::Nominal => self.kinetic_speed,
            SpeedFrame::Si => self.kinetic_speed * 0.01,
        };
        KineticParams {
            alpha,
            sigma0: self.sigma0_s,
            speed_c: speed,
            rho_diam: self.robot_diameter_m,
            sensor_range: self.sensor_range_m.max(0.5 * self.robot_diameter_m),
        }
    }

    pub fn tile_centers(&self) -> Vec<Vec2> {
        self.tiles.iter().map(|t| t.center).collect()
    }
}
