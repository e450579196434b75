//! Coverage, hitting times and replicate statistics.

use serde::{Deserialize, Serialize};

use crate::agents::HitTimeMap;
use crate::error::{invalid, Error, Result};
use crate::model::{Arena, GridSpec, Vec2};
use crate::pde::{DensityField, PdeCoefficients};

/// Square target region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetTile {
    pub center: Vec2,
    pub side: f64,
}

impl TargetTile {
    pub const fn new(center: Vec2, side: f64) -> Self {
        Self { center, side }
    }

    /// The two 10 cm tiles of the reference experiments.
    pub const fn reference_tiles() -> [TargetTile; 2] {
        [
            TargetTile::new(Vec2 { x: -0.55, y: 0.55 }, 0.1),
            TargetTile::new(Vec2 { x: 0.55, y: 0.45 }, 0.1),
        ]
    }

    pub fn vol(&self) -> f64 {
        self.side * self.side
    }

    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let h = 0.5 * self.side;
        (self.center.x - h, self.center.x + h, self.center.y - h, self.center.y + h)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let (x0, x1, y0, y1) = self.bounds();
        p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1
    }

    pub fn check_inside(&self, arena: &Arena) -> Result<()> {
        let (x0, x1, y0, y1) = self.bounds();
        if !(self.side > 0.0) || x0 < arena.x_min || x1 > arena.x_max || y0 < arena.y_min || y1 > arena.y_max {
            return Err(Error::TileOutsideArena {
                x: self.center.x,
                y: self.center.y,
                side: self.side,
            });
        }
        Ok(())
    }
}

/// Values sampled at strictly increasing times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl MetricSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(invalid("series", "times and values differ in length"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("series", "times must be strictly increasing"));
        }
        Ok(Self { times, values })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Linear interpolation, clamped to the end values.
    pub fn at(&self, t: f64) -> Option<f64> {
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            return self.values.first().copied();
        }
        if k == self.len() {
            return self.last();
        }
        let (t0, t1) = (self.times[k - 1], self.times[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    }

    /// Trapezoidal `(1/t) * integral_0^t`, with the series starting at 0.
    pub fn time_average(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::ZeroTimeAverage);
        }
        let mut acc = 0.0;
        for k in 1..self.len() {
            let (t0, t1) = (self.times[k - 1], self.times[k]);
            if t0 >= t {
                break;
            }
            let hi = t1.min(t);
            let (v0, vh) = (self.values[k - 1], self.at(hi).unwrap());
            acc += 0.5 * (v0 + vh) * (hi - t0);
        }
        Ok(acc / t)
    }
}

/// Pointwise mean and sample standard deviation over replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub n: usize,
}

impl EnsembleStats {
    pub fn mean_series(&self) -> MetricSeries {
        MetricSeries {
            times: self.times.clone(),
            values: self.mean.clone(),
        }
    }
}

/// Fraction of cells first visited no later than `t`.
pub fn coverage_discrete(map: &HitTimeMap, t: f64) -> f64 {
    let hit = map.raw().iter().filter(|&&s| s <= t).count();
    hit as f64 / map.grid().len() as f64
}

/// `integral min(s u, 1/|Omega|) dx` by the midpoint rule; `scale` is 1 for
/// the probability density and N for the expected robot density.
pub fn coverage_instantaneous(field: &DensityField, scale: f64) -> f64 {
    let rho = 1.0 / field.grid.arena.area();
    let sum: f64 = field.values.iter().map(|&u| (scale * u).min(rho)).sum();
    (sum * field.grid.cell_area()).min(1.0)
}

/// Time-averaged continuous coverage over snapshots starting at `t = 0`.
pub fn coverage_continuous(history: &[DensityField], t: f64, scale: f64) -> Result<f64> {
    instant_series(history, scale)?.time_average(t)
}

pub fn instant_series(history: &[DensityField], scale: f64) -> Result<MetricSeries> {
    MetricSeries::new(
        history.iter().map(|f| f.time).collect(),
        history.iter().map(|f| coverage_instantaneous(f, scale)).collect(),
    )
}

/// Exact integral of the cellwise-constant density over the tile.
pub fn tile_mass(field: &DensityField, tile: &TargetTile) -> Result<f64> {
    let weights = tile_weights(&field.grid, tile)?;
    Ok(weights.iter().map(|&(k, w)| field.values[k] * w).sum())
}

/// `(flat index, overlap area)` of every cell meeting the tile.
pub fn tile_weights(grid: &GridSpec, tile: &TargetTile) -> Result<Vec<(usize, f64)>> {
    tile.check_inside(&grid.arena)?;
    let (x0, x1, y0, y1) = tile.bounds();
    let a = grid.arena;
    let i0 = ((x0 - a.x_min) / grid.dx).floor().max(0.0) as usize;
    let i1 = (((x1 - a.x_min) / grid.dx).ceil() as usize).min(grid.nx);
    let j0 = ((y0 - a.y_min) / grid.dy).floor().max(0.0) as usize;
    let j1 = (((y1 - a.y_min) / grid.dy).ceil() as usize).min(grid.ny);
    let mut out = Vec::new();
    for i in i0..i1 {
        let cx0 = a.x_min + i as f64 * grid.dx;
        let ox = (x1.min(cx0 + grid.dx) - x0.max(cx0)).max(0.0);
        for j in j0..j1 {
            let cy0 = a.y_min + j as f64 * grid.dy;
            let oy = (y1.min(cy0 + grid.dy) - y0.max(cy0)).max(0.0);
            if ox * oy > 0.0 {
                out.push((grid.flat(i, j), ox * oy));
            }
        }
    }
    Ok(out)
}

/// First time the series reaches `level`, interpolated linearly inside the
/// bracketing interval.
pub fn first_crossing(series: &MetricSeries, level: f64) -> Option<f64> {
    let k = series.values.iter().position(|&v| v >= level)?;
    if k == 0 {
        return Some(series.times[0]);
    }
    let (t0, t1) = (series.times[k - 1], series.times[k]);
    let (v0, v1) = (series.values[k - 1], series.values[k]);
    Some(t0 + (t1 - t0) * (level - v0) / (v1 - v0))
}

/// Threshold time of the tile occupancy `integral_T s u dx >= delta`.
/// A threshold of exactly one is accepted and means the whole scaled mass.
pub fn hitting_time_pde(history: &[DensityField], tile: &TargetTile, delta: f64, scale: f64) -> Result<Option<f64>> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(invalid("delta", format!("{delta} is outside (0, 1]")));
    }
    let Some(first) = history.first() else {
        return Ok(None);
    };
    let weights = tile_weights(&first.grid, tile)?;
    let series = MetricSeries::new(
        history.iter().map(|f| f.time).collect(),
        history
            .iter()
            .map(|f| scale * weights.iter().map(|&(k, w)| f.values[k] * w).sum::<f64>())
            .collect(),
    )?;
    Ok(first_crossing(&series, delta))
}

/// Closed-form small-threshold approximation
/// `delta pi / (2^alpha C_hat vol(T) sum_i |x0 - x_i|^(-alpha-2))`.
pub fn hitting_time_analytic(
    tile: &TargetTile,
    positions: &[Vec2],
    coeffs: &PdeCoefficients,
    delta: f64,
) -> Result<f64> {
    check_delta(delta)?;
    if positions.is_empty() {
        return Err(invalid("positions", "need at least one robot"));
    }
    let alpha = coeffs.alpha;
    let mut sum = 0.0;
    for (robot, p) in positions.iter().enumerate() {
        let d = (tile.center - *p).norm();
        if d == 0.0 {
            return Err(Error::SingularHittingTime { robot });
        }
        sum += d.powf(-alpha - 2.0);
    }
    Ok(delta * std::f64::consts::PI / (2f64.powf(alpha) * coeffs.c_hat_alpha * tile.vol() * sum))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(invalid("delta", format!("{delta} is outside (0, 1)")))
    }
}

/// Per-cell mean first-visit time over replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalHitMap {
    pub grid: GridSpec,
    /// Mean over the replicates that reached the cell; `None` if none did.
    pub mean: Vec<Option<f64>>,
    pub unreached: Vec<usize>,
    pub replicates: usize,
}

pub fn hitmap_empirical(maps: &[HitTimeMap]) -> Result<EmpiricalHitMap> {
    let first = maps.first().ok_or_else(|| invalid("maps", "need at least one replicate"))?;
    let grid = *first.grid();
    let mut sum = vec![0.0; grid.len()];
    let mut hits = vec![0usize; grid.len()];
    for m in maps {
        if *m.grid() != grid {
            return Err(invalid("maps", "replicates use different grids"));
        }
        for (k, &t) in m.raw().iter().enumerate() {
            if t.is_finite() {
                sum[k] += t;
                hits[k] += 1;
            }
        }
    }
    Ok(EmpiricalHitMap {
        grid,
        mean: sum.iter().zip(&hits).map(|(&s, &h)| (h > 0).then(|| s / h as f64)).collect(),
        unreached: hits.iter().map(|&h| maps.len() - h).collect(),
        replicates: maps.len(),
    })
}

/// Earliest visit of any cell whose centre lies in the tile.
pub fn tile_first_visit(map: &HitTimeMap, tile: &TargetTile) -> Result<Option<f64>> {
    let grid = map.grid();
    tile.check_inside(&grid.arena)?;
    let mut best = f64::INFINITY;
    for i in 0..grid.nx {
        for j in 0..grid.ny {
            if tile.contains(grid.cell_center(i, j)) {
                best = best.min(map.raw()[grid.flat(i, j)]);
            }
        }
    }
    Ok(best.is_finite().then_some(best))
}

/// PDE-side hit map: a cell is reached when its expected occupancy
/// `s u dA` first reaches `delta * dA / |Omega|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeHitMap {
    pub grid: GridSpec,
    pub times: Vec<Option<f64>>,
    threshold: f64,
    scale: f64,
}

impl PdeHitMap {
    pub fn new(grid: GridSpec, delta: f64, scale: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(Self {
            grid,
            times: vec![None; grid.len()],
            threshold: delta / grid.arena.area(),
            scale,
        })
    }

    pub fn observe(&mut self, field: &DensityField) {
        for (slot, &u) in self.times.iter_mut().zip(&field.values) {
            if slot.is_none() && self.scale * u >= self.threshold {
                *slot = Some(field.time);
            }
        }
    }

    pub fn reached(&self) -> usize {
        self.times.iter().filter(|t| t.is_some()).count()
    }
}

pub fn ensemble_stats(series: &[MetricSeries]) -> Result<EnsembleStats> {
    let first = series.first().ok_or_else(|| invalid("series", "need at least one series"))?;
    for (k, s) in series.iter().enumerate() {
        if s.times != first.times {
            return Err(Error::MismatchedTimeAxes(format!("series {k} differs from series 0")));
        }
    }
    let n = series.len();
    let mut mean = Vec::with_capacity(first.len());
    let mut std = Vec::with_capacity(first.len());
    for k in 0..first.len() {
        let m = series.iter().map(|s| s.values[k]).sum::<f64>() / n as f64;
        let var = if n > 1 {
            series.iter().map(|s| (s.values[k] - m).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        mean.push(m);
        std.push(var.sqrt());
    }
    Ok(EnsembleStats {
        times: first.times.clone(),
        mean,
        std,
        n,
    })
}

/// First time a coverage series reaches `level`.
pub fn time_to_coverage(series: &MetricSeries, level: f64) -> Result<Option<f64>> {
    if !(level > 0.0 && level <= 1.0) {
        return Err(invalid("level", format!("{level} is outside (0, 1]")));
    }
    Ok(first_crossing(series, level))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(t: &[f64], v: &[f64]) -> MetricSeries {
        MetricSeries::new(t.to_vec(), v.to_vec()).unwrap()
    }

    #[test]
    fn discrete_coverage_counts() {
        let grid = GridSpec::with_counts(Arena::new(0.0, 1.0, 0.0, 1.0).unwrap(), 20, 20).unwrap();
        let mut m = HitTimeMap::new(grid);
        assert_eq!(coverage_discrete(&m, 5.0), 0.0);
        for k in 0..100 {
            m.visit_cell(k / 20, k % 20, k as f64);
        }
        assert_eq!(coverage_discrete(&m, 1000.0), 0.25);
        assert_eq!(coverage_discrete(&m, 9.0), 10.0 / 400.0);
    }

    #[test]
    fn interpolated_crossings() {
        let s = series(&[10.0, 11.0], &[0.48, 0.52]);
        assert!((time_to_coverage(&s, 0.5).unwrap().unwrap() - 10.5).abs() < 1e-12);
        let s = series(&[0.0, 1.0, 2.0], &[0.1, 0.5, 0.6]);
        assert_eq!(time_to_coverage(&s, 0.5).unwrap(), Some(1.0));
        let s = series(&[0.0, 1.0], &[0.1, 0.4]);
        assert_eq!(time_to_coverage(&s, 0.5).unwrap(), None);
    }

    #[test]
    fn two_point_ensemble() {
        let a = series(&[0.0, 1.0], &[0.4, 0.4]);
        let b = series(&[0.0, 1.0], &[0.6, 0.6]);
        let e = ensemble_stats(&[a.clone(), b]).unwrap();
        assert!((e.mean[0] - 0.5).abs() < 1e-15);
        assert!((e.std[1] - 0.02f64.sqrt()).abs() < 1e-15);
        let one = ensemble_stats(&[a.clone()]).unwrap();
        assert_eq!(one.std, vec![0.0, 0.0]);
        let c = series(&[0.0, 2.0], &[0.6, 0.6]);
        assert!(matches!(ensemble_stats(&[a, c]), Err(Error::MismatchedTimeAxes(_))));
    }

    #[test]
    fn time_average_of_constant() {
        let s = series(&[0.0, 1.0, 2.0], &[0.3, 0.3, 0.3]);
        assert!((s.time_average(1.5).unwrap() - 0.3).abs() < 1e-15);
        assert!(s.time_average(0.0).is_err());
    }

    #[test]
    fn tile_bounds_checked() {
        let grid = GridSpec::with_counts(Arena::reference(), 36, 44).unwrap();
        let tile = TargetTile::new(Vec2::new(0.88, 0.0), 0.1);
        assert!(tile_weights(&grid, &tile).is_err());
        let w: f64 = tile_weights(&grid, &TargetTile::reference_tiles()[0]).unwrap().iter().map(|p| p.1).sum();
        assert!((w - 0.01).abs() < 1e-14);
    }

    #[test]
    fn analytic_equidistant_formula() {
        let k = crate::pde::from_c0(1.5, 1.0, 0.21213203435596425732, 0.0);
        let tile = TargetTile::new(Vec2::new(0.0, 0.0), 0.1);
        let d: f64 = 0.3;
        let pts = [Vec2::new(d, 0.0), Vec2::new(-d, 0.0), Vec2::new(0.0, d), Vec2::new(0.0, -d)];
        let t = hitting_time_analytic(&tile, &pts, &k, 0.01).unwrap();
        let want = 0.01 * std::f64::consts::PI * d.powf(3.5) / (2f64.powf(3.5) * k.c_hat_alpha * 0.01);
        assert!((t / want - 1.0).abs() < 1e-12);
        let t2 = hitting_time_analytic(&tile, &pts, &k, 0.02).unwrap();
        assert!((t2 / t - 2.0).abs() < 1e-12);
        assert!(matches!(
            hitting_time_analytic(&tile, &[Vec2::ZERO], &k, 0.01),
            Err(Error::SingularHittingTime { robot: 0 })
        ));
    }

    #[test]
    fn empirical_hitmap_means() {
        let grid = GridSpec::with_counts(Arena::new(0.0, 1.0, 0.0, 1.0).unwrap(), 2, 2).unwrap();
        let mut a = HitTimeMap::new(grid);
        let mut b = HitTimeMap::new(grid);
        a.visit_cell(0, 0, 10.0);
        b.visit_cell(0, 0, 20.0);
        a.visit_cell(1, 1, 3.0);
        let h = hitmap_empirical(&[a, b]).unwrap();
        assert_eq!(h.mean[0], Some(15.0));
        assert_eq!(h.mean[3], Some(3.0));
        assert_eq!(h.unreached[3], 1);
        assert_eq!(h.mean[1], None);
        assert_eq!(h.unreached[1], 2);
    }
}
