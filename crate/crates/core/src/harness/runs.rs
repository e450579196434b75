use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{HitTimeMap, SimSettings, SimWorld};
use crate::error::{invalid, Error, Result};
use crate::metrics::{
    coverage_instantaneous, ensemble_stats, hitting_time_analytic, tile_first_visit, time_to_coverage,
    EnsembleStats, MetricSeries, PdeHitMap, TargetTile,
};
use crate::model::{ExperimentConfig, Mode, Vec2};
use crate::params::{Calibration, DensityScale, ModelParams};
use crate::pde::{
    build_initial_condition, build_spread_initial_condition, compute_coefficients, DensityField, EvolveReport,
    PdeCoefficients, SpectralSolver,
};
use crate::sampling::kernel_nu1;

/// Grid of swarm sizes and exponents sharing one base configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n_values: Vec<usize>,
    pub alpha_values: Vec<f64>,
    pub base: ExperimentConfig,
}

impl SweepSpec {
    /// Sizes 5 to 20 and exponents 1.1 to 1.9 of the reference study.
    pub fn reference(mode: Mode) -> Self {
        Self {
            n_values: vec![5, 10, 15, 20],
            alpha_values: vec![1.1, 1.3, 1.5, 1.7, 1.9],
            base: ExperimentConfig::reference(20, 1.5, mode),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: String| Error::InvalidConfig {
            key: key.into(),
            reason,
        };
        if self.n_values.is_empty() {
            return Err(bad("n_values", "must not be empty".into()));
        }
        if self.alpha_values.is_empty() {
            return Err(bad("alpha_values", "must not be empty".into()));
        }
        if let Some(a) = self.alpha_values.iter().find(|a| !(**a > 1.0 && **a < 2.0)) {
            return Err(bad("alpha_values", format!("{a} is outside (1, 2)")));
        }
        for c in self.points() {
            c.validate()?;
        }
        Ok(())
    }

    /// Per-point configurations in `(N, alpha)` order. A ring at the
    /// reference diameter of the base size follows the reference diameter of
    /// each swarm size; any other placement is kept as given.
    pub fn points(&self) -> Vec<ExperimentConfig> {
        let follows = matches!(self.base.placement, crate::model::Placement::Ring { diameter_m }
            if diameter_m == crate::model::reference_ring_diameter(self.base.n_robots));
        let mut out = Vec::new();
        for &n in &self.n_values {
            for &alpha in &self.alpha_values {
                let mut c = self.base.clone();
                c.n_robots = n;
                c.alpha = alpha;
                if follows {
                    c.placement = crate::model::Placement::Ring {
                        diameter_m: crate::model::reference_ring_diameter(n),
                    };
                }
                out.push(c);
            }
        }
        out
    }
}

/// Replicates of one agent experiment.
#[derive(Debug, Clone)]
pub struct AgentEnsemble {
    pub config: ExperimentConfig,
    pub series: Vec<MetricSeries>,
    pub maps: Vec<HitTimeMap>,
    pub stats: EnsembleStats,
}

impl AgentEnsemble {
    pub fn times_to_coverage(&self, level: f64) -> Result<Vec<Option<f64>>> {
        self.series.iter().map(|s| time_to_coverage(s, level)).collect()
    }

    pub fn tile_visits(&self, tile: &TargetTile) -> Result<Vec<Option<f64>>> {
        self.maps.iter().map(|m| tile_first_visit(m, tile)).collect()
    }

    pub fn final_coverage(&self) -> Vec<f64> {
        self.series.iter().filter_map(|s| s.last()).collect()
    }
}

/// Runs `f` on a pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| invalid("workers", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// All replicates of `config`; replicate `r` uses random streams
/// `(seed, r, robot)`. Results do not depend on the thread count.
pub fn run_agents(config: &ExperimentConfig, params: &ModelParams) -> Result<AgentEnsemble> {
    run_agents_in_domain(config, params, config.replicates, 0)
}

pub(crate) fn run_agents_in_domain(
    config: &ExperimentConfig,
    params: &ModelParams,
    replicates: usize,
    domain: u64,
) -> Result<AgentEnsemble> {
    config.validate()?;
    params.validate()?;
    let settings = SimSettings::from_params(params, config.alpha, config.mode)?;
    let poses = config.placement.poses(config.n_robots, &params.arena())?;
    let runs: Vec<(MetricSeries, HitTimeMap)> = (0..replicates as u64)
        .into_par_iter()
        .map(|rep| {
            let mut world = SimWorld::new_in_domain(settings, &poses, config.seed, rep, domain)?;
            let series = world.run(config.duration_s, config.record_interval_s)?;
            Ok((series, world.hit_map))
        })
        .collect::<Result<_>>()?;
    let (series, maps): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let stats = ensemble_stats(&series)?;
    Ok(AgentEnsemble {
        config: config.clone(),
        series,
        maps,
        stats,
    })
}

/// Starting density of the continuum run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    /// Single bump whose width shrinks with the swarm size.
    Ring,
    /// Five narrow bumps at the centre and near the corners.
    Spread,
}

/// Coefficients from the formulas, or with the fixed diffusivity when the
/// parameters ask for one. A fitted calibration is resolved by `compare`.
pub fn continuum_coefficients(alpha: f64, params: &ModelParams) -> Result<PdeCoefficients> {
    let k = compute_coefficients(
        &params.continuum_kinetics(alpha),
        kernel_nu1(&params.turn_kernel),
        params.epsilon,
        params.gamma,
    )?;
    match params.calibration {
        Calibration::Fixed { diffusivity } => k.with_diffusivity(diffusivity),
        _ => Ok(k),
    }
}

pub fn density_scale(params: &ModelParams, n_robots: usize) -> f64 {
    match params.density_scale {
        DensityScale::Unit => 1.0,
        DensityScale::RobotCount => n_robots as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TileHitting {
    pub tile: TargetTile,
    pub t0_pde: Option<f64>,
    pub t0_analytic: f64,
}

/// One continuum run.
#[derive(Debug, Clone)]
pub struct PdeOutcome {
    pub config: ExperimentConfig,
    pub coeffs: PdeCoefficients,
    /// Instantaneous coverage at the recording instants.
    pub coverage: MetricSeries,
    /// Running time average of `coverage` (its value at `t = 0` is the
    /// instantaneous one).
    pub coverage_avg: MetricSeries,
    pub tiles: Vec<TileHitting>,
    pub hitmap: Option<PdeHitMap>,
    pub final_field: DensityField,
    pub report: EvolveReport,
}

pub fn run_pde(config: &ExperimentConfig, params: &ModelParams) -> Result<PdeOutcome> {
    let coeffs = continuum_coefficients(config.alpha, params)?;
    run_pde_with(config, params, coeffs, InitialCondition::Ring)
}

pub fn run_pde_with(
    config: &ExperimentConfig,
    params: &ModelParams,
    coeffs: PdeCoefficients,
    ic: InitialCondition,
) -> Result<PdeOutcome> {
    config.validate()?;
    params.validate()?;
    let grid = params.pde_grid()?;
    let scale = density_scale(params, config.n_robots);
    let mut field = match ic {
        InitialCondition::Ring => build_initial_condition(config.n_robots, grid)?,
        InitialCondition::Spread => build_spread_initial_condition(grid)?,
    };
    let weights: Vec<Vec<(usize, f64)>> = params
        .tiles
        .iter()
        .map(|t| crate::metrics::tile_weights(&grid, t))
        .collect::<Result<_>>()?;
    let tile_mass = |f: &DensityField, w: &[(usize, f64)]| scale * w.iter().map(|&(k, a)| f.values[k] * a).sum::<f64>();

    let mut times = vec![field.time];
    let mut cov = vec![coverage_instantaneous(&field, scale)];
    let mut masses: Vec<Vec<f64>> = weights.iter().map(|w| vec![tile_mass(&field, w)]).collect();
    let mut hitmap = if params.pde_hitmap {
        let mut h = PdeHitMap::new(grid, params.delta, scale)?;
        h.observe(&field);
        Some(h)
    } else {
        None
    };

    let mut solver = SpectralSolver::new(grid, coeffs);
    let report = solver.evolve(
        &mut field,
        config.duration_s,
        params.pde_dt_s,
        config.record_interval_s,
        params.pde_scheme,
        |f| {
            times.push(f.time);
            cov.push(coverage_instantaneous(f, scale));
            for (m, w) in masses.iter_mut().zip(&weights) {
                m.push(tile_mass(f, w));
            }
            if let Some(h) = hitmap.as_mut() {
                h.observe(f);
            }
            Ok(())
        },
    )?;

    let coverage = MetricSeries::new(times.clone(), cov)?;
    let coverage_avg = running_average(&coverage)?;
    let positions: Vec<Vec2> = config
        .placement
        .poses(config.n_robots, &params.arena())?
        .iter()
        .map(|p| p.position())
        .collect();
    let mut tiles = Vec::new();
    for (tile, m) in params.tiles.iter().zip(masses) {
        let series = MetricSeries::new(times.clone(), m)?;
        tiles.push(TileHitting {
            tile: *tile,
            t0_pde: crate::metrics::first_crossing(&series, params.delta),
            t0_analytic: hitting_time_analytic(tile, &positions, &coeffs, params.delta)?,
        });
    }
    Ok(PdeOutcome {
        config: config.clone(),
        coeffs,
        coverage,
        coverage_avg,
        tiles,
        hitmap,
        final_field: field,
        report,
    })
}

pub(crate) fn running_average(s: &MetricSeries) -> Result<MetricSeries> {
    let mut out = Vec::with_capacity(s.len());
    let mut acc = 0.0;
    for k in 0..s.len() {
        if k == 0 {
            out.push(s.values[0]);
            continue;
        }
        acc += 0.5 * (s.values[k - 1] + s.values[k]) * (s.times[k] - s.times[k - 1]);
        let span = s.times[k] - s.times[0];
        out.push(acc / span);
    }
    MetricSeries::new(s.times.clone(), out)
}
