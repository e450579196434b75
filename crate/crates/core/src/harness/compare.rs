use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::io::{aggregate_rows, coverage_rows, write_rows_to, HittingRow, PdeCoverageRow};
use crate::harness::runs::{
    continuum_coefficients, run_agents, run_agents_in_domain, run_pde_with, AgentEnsemble, InitialCondition,
    PdeOutcome, SweepSpec,
};
use crate::metrics::{time_to_coverage, EnsembleStats, MetricSeries};
use crate::model::ExperimentConfig;
use crate::params::{Calibration, ModelParams};
use crate::pde::{PdeCoefficients, Scheme};

/// Required fraction of recording instants inside the agent band.
pub const BAND_THRESHOLD: f64 = 0.9;

/// Random-stream domain of calibration ensembles.
const CALIBRATION_DOMAIN: u64 = 1;

/// Mean and sample deviation over the replicates where a quantity exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpreadStat {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub reached: usize,
    pub n: usize,
}

impl SpreadStat {
    pub fn of(values: &[Option<f64>]) -> Self {
        let got: Vec<f64> = values.iter().flatten().copied().collect();
        let k = got.len();
        let mean = (k > 0).then(|| got.iter().sum::<f64>() / k as f64);
        let std = mean.map(|m| {
            if k > 1 {
                (got.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1) as f64).sqrt()
            } else {
                0.0
            }
        });
        Self {
            mean,
            std,
            reached: k,
            n: values.len(),
        }
    }
}

/// Agents against the continuum at one `(N, alpha)`.
#[derive(Debug, Clone)]
pub struct ComparisonPoint {
    pub n_robots: usize,
    pub alpha: f64,
    pub agents: AgentEnsemble,
    pub pde: PdeOutcome,
    pub band_fraction: f64,
    pub t50_agents: SpreadStat,
    pub t50_pde: Option<f64>,
    pub final_agents: SpreadStat,
    pub final_pde: f64,
    pub hitting: Vec<HittingRow>,
}

impl ComparisonPoint {
    pub fn passed(&self) -> bool {
        self.band_fraction >= BAND_THRESHOLD
    }

    pub fn label(&self) -> String {
        point_label(self.n_robots, self.alpha)
    }
}

pub(crate) fn point_label(n: usize, alpha: f64) -> String {
    format!("N{n}_a{alpha}")
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub sweep: SweepSpec,
    pub params: ModelParams,
    pub points: Vec<ComparisonPoint>,
}

/// Machine-readable verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub band_threshold: f64,
    pub passed: bool,
    pub points: Vec<SummaryPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryPoint {
    pub n_robots: usize,
    pub alpha: f64,
    pub diffusivity: f64,
    pub band_fraction: f64,
    pub passed: bool,
    pub t50_agents: SpreadStat,
    pub t50_pde_s: Option<f64>,
    pub final_agents: SpreadStat,
    pub final_pde: f64,
    pub hitting: Vec<HittingRow>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(ComparisonPoint::passed)
    }

    pub fn point(&self, n: usize, alpha: f64) -> Option<&ComparisonPoint> {
        self.points.iter().find(|p| p.n_robots == n && p.alpha == alpha)
    }

    pub fn summary(&self) -> Summary {
        Summary {
            band_threshold: BAND_THRESHOLD,
            passed: self.passed(),
            points: self
                .points
                .iter()
                .map(|p| SummaryPoint {
                    n_robots: p.n_robots,
                    alpha: p.alpha,
                    diffusivity: p.pde.coeffs.d_eff,
                    band_fraction: p.band_fraction,
                    passed: p.passed(),
                    t50_agents: p.t50_agents,
                    t50_pde_s: p.t50_pde,
                    final_agents: p.final_agents,
                    final_pde: p.final_pde,
                    hitting: p.hitting.clone(),
                })
                .collect(),
        }
    }

    pub fn summary_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.1}"));
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>4} {:>5} {:>10} {:>6} {:>9} {:>8} {:>9} {:>8}  verdict",
            "N", "alpha", "D", "band", "t50 ag", "t50 pde", "final ag", "fin pde"
        );
        for p in &self.points {
            let _ = writeln!(
                s,
                "{:>4} {:>5} {:>10.4e} {:>6.3} {:>9} {:>8} {:>9.4} {:>8.4}  {}",
                p.n_robots,
                p.alpha,
                p.pde.coeffs.d_eff,
                p.band_fraction,
                opt(p.t50_agents.mean),
                opt(p.t50_pde),
                p.final_agents.mean.unwrap_or(f64::NAN),
                p.final_pde,
                if p.passed() { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(s, "overall: {}", if self.passed() { "pass" } else { "FAIL" });
        s
    }

    /// Per-point CSVs plus `summary.json` and `summary.txt` under `out`.
    pub fn write_outputs(&self, out: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(out)?;
        let mut written = Vec::new();
        for p in &self.points {
            let dir = out.join(p.label());
            std::fs::create_dir_all(&dir)?;
            let f = dir.join("agents_coverage.csv");
            write_rows_to(&coverage_rows(&p.agents.series), &f)?;
            written.push(f);
            let f = dir.join("agents_aggregate.csv");
            write_rows_to(&aggregate_rows(&p.agents.stats), &f)?;
            written.push(f);
            let f = dir.join("pde_coverage.csv");
            write_rows_to(&pde_rows(&p.pde), &f)?;
            written.push(f);
            let f = dir.join("hitting_times.csv");
            write_rows_to(&p.hitting, &f)?;
            written.push(f);
        }
        let f = out.join("summary.json");
        std::fs::write(&f, serde_json::to_string_pretty(&self.summary())? + "\n")?;
        written.push(f);
        let f = out.join("summary.txt");
        std::fs::write(&f, self.summary_text())?;
        written.push(f);
        Ok(written)
    }
}

pub fn pde_rows(p: &PdeOutcome) -> Vec<PdeCoverageRow> {
    (0..p.coverage.len())
        .map(|k| PdeCoverageRow {
            time_s: p.coverage.times[k],
            coverage: p.coverage.values[k],
            coverage_avg: p.coverage_avg.values[k],
        })
        .collect()
}

/// Fraction of shared recording instants with `|pde - mean| <= std`.
pub fn band_fraction(agents: &EnsembleStats, pde: &MetricSeries) -> Result<f64> {
    if agents.times != pde.times {
        return Err(Error::MismatchedTimeAxes(format!(
            "agents record {} instants, continuum {}",
            agents.times.len(),
            pde.times.len()
        )));
    }
    if pde.is_empty() {
        return Ok(0.0);
    }
    let inside = (0..pde.len())
        .filter(|&k| (pde.values[k] - agents.mean[k]).abs() <= agents.std[k])
        .count();
    Ok(inside as f64 / pde.len() as f64)
}

/// Pairs completed runs point by point.
pub fn compare_runs(
    sweep: &SweepSpec,
    params: &ModelParams,
    agents: Vec<AgentEnsemble>,
    pdes: Vec<PdeOutcome>,
) -> Result<ComparisonReport> {
    let mut missing = Vec::new();
    let mut points = Vec::new();
    for cfg in sweep.points() {
        let same = |c: &ExperimentConfig| c.n_robots == cfg.n_robots && c.alpha == cfg.alpha;
        let a = agents.iter().find(|a| same(&a.config));
        let p = pdes.iter().find(|p| same(&p.config));
        match (a, p) {
            (Some(a), Some(p)) => points.push(compare_point(params, a.clone(), p.clone())?),
            (a, p) => {
                let what = match (a.is_none(), p.is_none()) {
                    (true, true) => "agents, continuum",
                    (true, false) => "agents",
                    _ => "continuum",
                };
                missing.push(format!("(N={}, alpha={}: {what})", cfg.n_robots, cfg.alpha));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingRuns(missing.join(", ")));
    }
    Ok(ComparisonReport {
        sweep: sweep.clone(),
        params: params.clone(),
        points,
    })
}

fn compare_point(params: &ModelParams, agents: AgentEnsemble, pde: PdeOutcome) -> Result<ComparisonPoint> {
    let band_fraction = band_fraction(&agents.stats, &pde.coverage)?;
    let t50_agents = SpreadStat::of(&agents.times_to_coverage(0.5)?);
    let t50_pde = time_to_coverage(&pde.coverage, 0.5)?;
    let finals: Vec<Option<f64>> = agents.final_coverage().into_iter().map(Some).collect();
    let mut hitting = Vec::new();
    for (tile, th) in params.tiles.iter().zip(&pde.tiles) {
        let visits = SpreadStat::of(&agents.tile_visits(tile)?);
        hitting.push(HittingRow {
            tile_x: tile.center.x,
            tile_y: tile.center.y,
            alpha: agents.config.alpha,
            t0_pde_s: th.t0_pde,
            t0_analytic_s: th.t0_analytic,
            t0_agents_mean_s: visits.mean,
            t0_agents_std_s: visits.std,
        });
    }
    Ok(ComparisonPoint {
        n_robots: agents.config.n_robots,
        alpha: agents.config.alpha,
        final_pde: pde.coverage.last().unwrap_or(0.0),
        t50_agents,
        t50_pde,
        final_agents: SpreadStat::of(&finals),
        band_fraction,
        hitting,
        agents,
        pde,
    })
}

/// Coefficients for one point under the configured calibration. The fitted
/// variant matches a separate agent ensemble drawn from its own random
/// streams, so the comparison ensemble never informs the fit.
pub fn calibrated_coefficients(config: &ExperimentConfig, params: &ModelParams) -> Result<PdeCoefficients> {
    let formula = continuum_coefficients(config.alpha, params)?;
    let Calibration::Fit { replicates } = params.calibration else {
        return Ok(formula);
    };
    let held_out = run_agents_in_domain(config, params, replicates.max(1), CALIBRATION_DOMAIN)?;
    let d = fit_diffusivity(config, params, formula, &held_out.stats.mean_series())?;
    formula.with_diffusivity(d)
}

/// Least-squares diffusivity against a target coverage curve: log-spaced
/// scan, then golden-section refinement around the best scan point.
pub fn fit_diffusivity(
    config: &ExperimentConfig,
    params: &ModelParams,
    base: PdeCoefficients,
    target: &MetricSeries,
) -> Result<f64> {
    let mut quick = params.clone();
    quick.pde_hitmap = false;
    if quick.pde_scheme == Scheme::ExactExp {
        // the propagator is exact, so only clipping depends on the step
        quick.pde_dt_s = quick.pde_dt_s.max(config.record_interval_s);
    }
    let cost = |log_d: f64| -> Result<f64> {
        let k = base.with_diffusivity(log_d.exp())?;
        let run = run_pde_with(config, &quick, k, InitialCondition::Ring)?;
        if run.coverage.times != target.times {
            return Err(Error::MismatchedTimeAxes("calibration target".into()));
        }
        Ok(run.coverage.values.iter().zip(&target.values).map(|(a, b)| (a - b).powi(2)).sum())
    };
    let (lo, hi, steps) = ((1e-6f64).ln(), (10f64).ln(), 29);
    let grid: Vec<f64> = (0..steps).map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64).collect();
    let costs: Vec<f64> = grid.iter().map(|&x| cost(x)).collect::<Result<_>>()?;
    let best = (0..steps).min_by(|&a, &b| costs[a].total_cmp(&costs[b])).unwrap_or(0);
    let (mut a, mut b) = (grid[best.saturating_sub(1)], grid[(best + 1).min(steps - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (cost(c)?, cost(d)?);
    for _ in 0..40 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d)?;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// Runs agents and the continuum at every sweep point and compares them.
pub fn compare(sweep: &SweepSpec, params: &ModelParams) -> Result<ComparisonReport> {
    sweep.validate()?;
    params.validate()?;
    let mut agents = Vec::new();
    let mut pdes = Vec::new();
    for cfg in sweep.points() {
        agents.push(run_agents(&cfg, params)?);
        let k = calibrated_coefficients(&cfg, params)?;
        pdes.push(run_pde_with(&cfg, params, k, InitialCondition::Ring)?);
    }
    compare_runs(sweep, params, agents, pdes)
}
