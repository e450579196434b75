use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::GridSpec;
use crate::pde::coefficients::PdeCoefficients;
use crate::pde::field::DensityField;

/// Time integrator for the diagonalised operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Multiply mode `k` by `exp(-mu_k dt)`.
    ExactExp,
    /// Multiply mode `k` by `1 / (1 + mu_k dt)`.
    ImplicitEuler,
}

/// Decay rates `mu_k = D (lx^2 + ly^2)^(alpha/2)` of the cosine modes, in
/// storage order, with `lx = pi kx / Lx`.
pub fn spectral_operator(grid: &GridSpec, coeffs: &PdeCoefficients) -> Vec<f64> {
    let lx = grid.arena.width();
    let ly = grid.arena.height();
    let mut mu = Vec::with_capacity(grid.len());
    for kx in 0..grid.nx {
        let fx = std::f64::consts::PI * kx as f64 / lx;
        for ky in 0..grid.ny {
            let fy = std::f64::consts::PI * ky as f64 / ly;
            mu.push(coeffs.d_eff * (fx * fx + fy * fy).powf(coeffs.alpha / 2.0));
        }
    }
    mu
}

/// Outcome of one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    /// Mass removed by clipping negative values, before renormalisation.
    pub clipped_mass: f64,
}

/// Totals over an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EvolveReport {
    pub steps: usize,
    pub max_clipped_mass: f64,
}

/// Cosine-basis solver for one grid and one set of coefficients. Holds the
/// transform plans and the per-step factors of the last step length used.
pub struct SpectralSolver {
    grid: GridSpec,
    coeffs: PdeCoefficients,
    mu: Vec<f64>,
    plan_x: Arc<dyn TransformType2And3<f64>>,
    plan_y: Arc<dyn TransformType2And3<f64>>,
    buf: Vec<f64>,
    work: Vec<f64>,
    scratch: Vec<f64>,
    factors: Option<(f64, Scheme, Vec<f64>)>,
}

impl std::fmt::Debug for SpectralSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSolver")
            .field("grid", &self.grid)
            .field("coeffs", &self.coeffs)
            .finish_non_exhaustive()
    }
}

impl SpectralSolver {
    pub fn new(grid: GridSpec, coeffs: PdeCoefficients) -> Self {
        let mut planner = DctPlanner::new();
        let plan_x = planner.plan_dct2(grid.nx);
        let plan_y = planner.plan_dct2(grid.ny);
        let scratch_len = plan_x.get_scratch_len().max(plan_y.get_scratch_len());
        Self {
            mu: spectral_operator(&grid, &coeffs),
            grid,
            coeffs,
            plan_x,
            plan_y,
            buf: vec![0.0; grid.len()],
            scratch: vec![0.0; scratch_len],
            work: vec![0.0; grid.len()],
            factors: None,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coefficients(&self) -> &PdeCoefficients {
        &self.coeffs
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.mu
    }

    /// Forward: rows along y, then a transpose, then rows along x, leaving
    /// the coefficients in `(ky, kx)` order in `self.work`. Inverse undoes it.
    fn forward(&mut self, values: &[f64]) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        self.buf.copy_from_slice(values);
        run_rows(&self.plan_y, &mut self.buf, ny, false, &mut self.scratch);
        transpose(&self.buf, &mut self.work, nx, ny);
        run_rows(&self.plan_x, &mut self.work, nx, false, &mut self.scratch);
    }

    fn inverse(&mut self, values: &mut [f64]) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        run_rows(&self.plan_x, &mut self.work, nx, true, &mut self.scratch);
        transpose(&self.work, values, ny, nx);
        run_rows(&self.plan_y, values, ny, true, &mut self.scratch);
    }

    /// Refreshes the cached per-mode factors when `dt` or the scheme changed.
    fn ensure_factors(&mut self, dt: f64, scheme: Scheme) {
        if matches!(&self.factors, Some((h, s, _)) if *h == dt && *s == scheme) {
            return;
        }
        // the unnormalised DCT-III of a DCT-II scales by n/2 per axis
        let norm = 4.0 / (self.grid.nx * self.grid.ny) as f64;
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let f: Vec<f64> = (0..nx * ny)
            .map(|t| self.mu[(t % nx) * ny + t / nx])
            .map(|m| {
                norm * match scheme {
                    Scheme::ExactExp => (-m * dt).exp(),
                    Scheme::ImplicitEuler => 1.0 / (1.0 + m * dt),
                }
            })
            .collect();
        self.factors = Some((dt, scheme, f));
    }

    /// Applies the linear propagator to `values` in place.
    fn propagate(&mut self, values: &mut [f64], dt: f64, scheme: Scheme) {
        self.ensure_factors(dt, scheme);
        self.forward(values);
        if let Some((_, _, f)) = &self.factors {
            self.work.iter_mut().zip(f).for_each(|(v, k)| *v *= k);
        }
        self.inverse(values);
    }

    /// One linear step; negative undershoots are clipped and the mass
    /// restored by rescaling.
    pub fn step(&mut self, field: &mut DensityField, dt: f64, scheme: Scheme) -> Result<StepReport> {
        check_dt(dt)?;
        let mass = field.mass();
        let mut values = std::mem::take(&mut field.values);
        self.propagate(&mut values, dt, scheme);
        field.values = values;
        field.time += dt;
        Ok(clip_and_rescale(field, mass))
    }

    /// One lagged-coefficient step: the mobility `m = F(0) / F(s u)` is frozen
    /// from the current state and `u <- u + (S(dt) - I)(m u)`, which keeps the
    /// mass exactly and reduces to [`SpectralSolver::step`] when `m = 1`.
    pub fn step_nonlinear(
        &mut self,
        field: &mut DensityField,
        dt: f64,
        term: &InteractionTerm,
        density_scale: f64,
    ) -> Result<StepReport> {
        check_dt(dt)?;
        let mass = field.mass();
        let f0 = term.eval(0.0)?;
        let mut moved = Vec::with_capacity(field.values.len());
        for &u in &field.values {
            moved.push(u * f0 / term.eval(density_scale * u)?);
        }
        let mut spread = moved.clone();
        self.propagate(&mut spread, dt, Scheme::ExactExp);
        for ((u, m), s) in field.values.iter_mut().zip(&moved).zip(&spread) {
            *u += s - m;
        }
        field.time += dt;
        Ok(clip_and_rescale(field, mass))
    }

    /// Steps with length `dt` to `t_end`, shortening steps so that every
    /// recording instant `t0 + k * interval` is hit exactly, and calls `hook`
    /// at each instant after the start.
    pub fn evolve<F>(
        &mut self,
        field: &mut DensityField,
        t_end: f64,
        dt: f64,
        record_interval: f64,
        scheme: Scheme,
        mut hook: F,
    ) -> Result<EvolveReport>
    where
        F: FnMut(&DensityField) -> Result<()>,
    {
        self.drive(field, t_end, dt, record_interval, &mut hook, |s, f, h| s.step(f, h, scheme))
    }

    /// [`SpectralSolver::evolve`] with the interaction-dependent mobility.
    pub fn evolve_nonlinear<F>(
        &mut self,
        field: &mut DensityField,
        t_end: f64,
        dt: f64,
        record_interval: f64,
        term: &InteractionTerm,
        density_scale: f64,
        mut hook: F,
    ) -> Result<EvolveReport>
    where
        F: FnMut(&DensityField) -> Result<()>,
    {
        self.drive(field, t_end, dt, record_interval, &mut hook, |s, f, h| {
            s.step_nonlinear(f, h, term, density_scale)
        })
    }

    fn drive<F, S>(
        &mut self,
        field: &mut DensityField,
        t_end: f64,
        dt: f64,
        record_interval: f64,
        hook: &mut F,
        mut step: S,
    ) -> Result<EvolveReport>
    where
        F: FnMut(&DensityField) -> Result<()>,
        S: FnMut(&mut Self, &mut DensityField, f64) -> Result<StepReport>,
    {
        check_dt(dt)?;
        if !(record_interval > 0.0) {
            return Err(invalid("record_interval", "must be positive"));
        }
        let t0 = field.time;
        if t_end < t0 {
            return Err(invalid("t_end", format!("{t_end} is before the field time {t0}")));
        }
        let mut report = EvolveReport::default();
        let instants = crate::model::record_times(t_end - t0, record_interval);
        for &offset in instants.iter().skip(1) {
            let target = t0 + offset;
            loop {
                let left = target - field.time;
                if left <= 1e-9 * dt {
                    break;
                }
                let h = if (left - dt).abs() <= 1e-9 * dt || left > dt { dt } else { left };
                let r = step(self, field, h)?;
                report.steps += 1;
                report.max_clipped_mass = report.max_clipped_mass.max(r.clipped_mass);
            }
            field.time = target;
            hook(field)?;
        }
        Ok(report)
    }
}

fn run_rows(plan: &Arc<dyn TransformType2And3<f64>>, data: &mut [f64], len: usize, inverse: bool, scratch: &mut [f64]) {
    for row in data.chunks_exact_mut(len) {
        if inverse {
            plan.process_dct3_with_scratch(row, scratch);
        } else {
            plan.process_dct2_with_scratch(row, scratch);
        }
    }
}

/// `dst[c * rows + r] = src[r * cols + c]` for a `rows x cols` source.
fn transpose(src: &[f64], dst: &mut [f64], rows: usize, cols: usize) {
    const B: usize = 16;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(invalid("dt", format!("must be positive, got {dt}")))
    }
}

fn clip_and_rescale(field: &mut DensityField, mass: f64) -> StepReport {
    let mut clipped = 0.0;
    for v in &mut field.values {
        if *v < 0.0 {
            clipped -= *v;
            *v = 0.0;
        }
    }
    let clipped_mass = clipped * field.grid.cell_area();
    let now = field.mass();
    if now > 0.0 && clipped_mass > 0.0 {
        let k = mass / now;
        field.values.iter_mut().for_each(|v| *v *= k);
    }
    StepReport { clipped_mass }
}

/// The density-dependent factor `F(u) = a + b u` of the interacting
/// equation, with `a = (alpha-1)(1-nu1) / (sigma0 |S|)` and
/// `b = 32 c0^3 / (3 |S|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionTerm {
    pub constant: f64,
    pub slope: f64,
}

impl InteractionTerm {
    pub fn new(coeffs: &PdeCoefficients) -> Self {
        Self {
            constant: (coeffs.alpha - 1.0) * (1.0 - coeffs.nu1) / (coeffs.sigma0 * coeffs.s_abs),
            slope: 32.0 * coeffs.c0.powi(3) / (3.0 * coeffs.s_abs * coeffs.s_abs),
        }
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        let f = self.constant + self.slope * u;
        if f > 0.0 {
            Ok(f)
        } else {
            Err(crate::error::Error::NonPositiveInteraction { value: f })
        }
    }
}

/// One step of a throwaway solver.
pub fn step_density(field: &DensityField, coeffs: &PdeCoefficients, dt: f64, scheme: Scheme) -> Result<DensityField> {
    let mut out = field.clone();
    SpectralSolver::new(field.grid, *coeffs).step(&mut out, dt, scheme)?;
    Ok(out)
}

/// Snapshots at every recording instant after `field.time` up to `t_end`.
pub fn evolve(
    field: &DensityField,
    coeffs: &PdeCoefficients,
    t_end: f64,
    record_interval: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<Vec<DensityField>> {
    let mut solver = SpectralSolver::new(field.grid, *coeffs);
    let mut u = field.clone();
    let mut out = Vec::new();
    solver.evolve(&mut u, t_end, dt, record_interval, scheme, |f| {
        out.push(f.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Nonlinear counterpart of [`evolve`]; returns the final field.
pub fn evolve_nonlinear(
    field: &DensityField,
    coeffs: &PdeCoefficients,
    t_end: f64,
    dt: f64,
    density_scale: f64,
) -> Result<DensityField> {
    let mut solver = SpectralSolver::new(field.grid, *coeffs);
    let term = InteractionTerm::new(coeffs);
    let mut u = field.clone();
    let span = (t_end - field.time).max(dt);
    solver.evolve_nonlinear(&mut u, t_end, dt, span, &term, density_scale, |_| Ok(()))?;
    Ok(u)
}
