//! Shared domain vocabulary: geometry, grids, configuration and seeded
//! random streams.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A point or displacement in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2*pi for tiny negative inputs
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Axis-aligned rectangular arena with reflecting walls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arena {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Arena {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(invalid(
                "arena",
                format!("need x_min < x_max and y_min < y_max, got [{x_min}, {x_max}] x [{y_min}, {y_max}]"),
            ));
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// The 1.8 m x 2.2 m arena in the canonical frame, `[-0.9, 0.9] x [-1.1, 1.1]`.
    ///
    /// The simulated 220 cm x 180 cm arena is the same rectangle with axes
    /// swapped; everything in this crate uses this orientation.
    pub fn reference() -> Self {
        Self {
            x_min: -0.9,
            x_max: 0.9,
            y_min: -1.1,
            y_max: 1.1,
        }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    /// The region available to the centre of a disk of the given radius.
    pub fn shrunk(&self, margin: f64) -> Arena {
        Arena {
            x_min: self.x_min + margin,
            x_max: self.x_max - margin,
            y_min: self.y_min + margin,
            y_max: self.y_max - margin,
        }
    }
}

/// Uniform cell grid laid over an arena.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub arena: Arena,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl GridSpec {
    /// Square cells of side `cell_size`; counts are rounded so the grid spans
    /// the arena to within one cell.
    pub fn with_cell_size(arena: Arena, cell_size: f64) -> Result<Self> {
        if !(cell_size > 0.0) {
            return Err(invalid("cell_size", "must be positive"));
        }
        let nx = ((arena.width() / cell_size).round() as usize).max(1);
        let ny = ((arena.height() / cell_size).round() as usize).max(1);
        Ok(Self {
            arena,
            nx,
            ny,
            dx: cell_size,
            dy: cell_size,
        })
    }

    /// Exactly `nx` x `ny` cells tiling the arena.
    pub fn with_counts(arena: Arena, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(invalid("grid", "cell counts must be positive"));
        }
        Ok(Self {
            arena,
            nx,
            ny,
            dx: arena.width() / nx as f64,
            dy: arena.height() / ny as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Row-major flat index, `i` fastest along y: `i * ny + j`.
    pub fn flat(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(
            self.arena.x_min + (i as f64 + 0.5) * self.dx,
            self.arena.y_min + (j as f64 + 0.5) * self.dy,
        )
    }

    /// Maps a point of the closed arena to its cell; far edges are clamped
    /// into the last row/column.
    pub fn cell_index(&self, p: Vec2) -> Result<(usize, usize)> {
        if !self.arena.contains(p) {
            return Err(Error::OutOfDomain { x: p.x, y: p.y });
        }
        let i = ((p.x - self.arena.x_min) / self.dx).floor() as usize;
        let j = ((p.y - self.arena.y_min) / self.dy).floor() as usize;
        Ok((i.min(self.nx - 1), j.min(self.ny - 1)))
    }
}

/// Free-function form of [`GridSpec::cell_index`] for an explicit arena.
pub fn cell_index(p: Vec2, grid: &GridSpec, arena: &Arena) -> Result<(usize, usize)> {
    if grid.arena != *arena {
        let g = GridSpec {
            arena: *arena,
            ..*grid
        };
        return g.cell_index(p);
    }
    grid.cell_index(p)
}

/// A robot's initial position and heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// `n` robots equally spaced on a circle, each facing radially outward.
pub fn ring_placement(n: usize, diameter: f64, center: Vec2) -> Result<Vec<Pose>> {
    if n == 0 {
        return Err(invalid("n_robots", "must be at least 1"));
    }
    if !(diameter >= 0.0) {
        return Err(invalid("diameter", "must be non-negative"));
    }
    let radius = 0.5 * diameter;
    Ok((0..n)
        .map(|k| {
            let heading = wrap_angle(2.0 * PI * k as f64 / n as f64);
            let p = center + Vec2::from_angle(heading) * radius;
            Pose {
                x: p.x,
                y: p.y,
                heading,
            }
        })
        .collect())
}

/// Ring diameter used for each swarm size in the reference setup; other
/// sizes interpolate linearly in `n`, clamped to the tabulated range.
pub fn reference_ring_diameter(n: usize) -> f64 {
    const TABLE: [(usize, f64); 4] = [(5, 0.25), (10, 0.30), (15, 0.40), (20, 0.55)];
    if n <= TABLE[0].0 {
        return TABLE[0].1;
    }
    for w in TABLE.windows(2) {
        let ((n0, d0), (n1, d1)) = (w[0], w[1]);
        if n <= n1 {
            return d0 + (d1 - d0) * (n - n0) as f64 / (n1 - n0) as f64;
        }
    }
    TABLE[3].1
}

/// Which movement engine drives the robots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Rotate-then-drive controller with obstacle stops.
    Webots,
    /// Velocity-jump process with finite-size elastic robots.
    Kinetic,
    /// Velocity-jump process with point robots and no collisions.
    Point,
}

/// Initial placement of the swarm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Placement {
    Ring { diameter_m: f64 },
    Explicit { positions: Vec<Pose> },
}

impl Placement {
    pub fn poses(&self, n: usize, arena: &Arena) -> Result<Vec<Pose>> {
        match self {
            Placement::Ring { diameter_m } => ring_placement(n, *diameter_m, arena.center()),
            Placement::Explicit { positions } => {
                if positions.len() != n {
                    return Err(Error::InvalidConfig {
                        key: "placement.positions".into(),
                        reason: format!("{} poses given for {} robots", positions.len(), n),
                    });
                }
                for p in positions {
                    if !arena.contains(p.position()) {
                        return Err(Error::InvalidConfig {
                            key: "placement.positions".into(),
                            reason: format!("pose ({}, {}) outside arena", p.x, p.y),
                        });
                    }
                }
                Ok(positions.clone())
            }
        }
    }
}

/// One experiment: swarm size, Lévy exponent, horizon and replicate count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_robots: usize,
    pub alpha: f64,
    pub duration_s: f64,
    pub record_interval_s: f64,
    pub seed: u64,
    pub mode: Mode,
    pub replicates: usize,
    pub placement: Placement,
}

impl ExperimentConfig {
    /// Reference setup for `n` robots: reference ring diameter, 20 minute horizon,
    /// coverage recorded every second.
    pub fn reference(n_robots: usize, alpha: f64, mode: Mode) -> Self {
        Self {
            n_robots,
            alpha,
            duration_s: 1200.0,
            record_interval_s: 1.0,
            seed: 1,
            mode,
            replicates: 30,
            placement: Placement::Ring {
                diameter_m: reference_ring_diameter(n_robots),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: &str| {
            Err(Error::InvalidConfig {
                key: key.to_string(),
                reason: reason.to_string(),
            })
        };
        if self.n_robots == 0 {
            return bad("n_robots", "must be at least 1");
        }
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return bad("alpha", "must lie in (1, 2)");
        }
        if !(self.duration_s >= 0.0 && self.duration_s.is_finite()) {
            return bad("duration_s", "must be non-negative and finite");
        }
        if !(self.record_interval_s > 0.0) {
            return bad("record_interval_s", "must be positive");
        }
        if self.replicates == 0 {
            return bad("replicates", "must be at least 1");
        }
        if let Placement::Ring { diameter_m } = self.placement {
            if !(diameter_m >= 0.0) {
                return bad("placement.diameter_m", "must be non-negative");
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Recording instants `0, dt, 2 dt, ...` up to and including the horizon.
    pub fn record_times(&self) -> Vec<f64> {
        record_times(self.duration_s, self.record_interval_s)
    }
}

pub(crate) fn record_times(duration: f64, interval: f64) -> Vec<f64> {
    let n = (duration / interval + 1e-9).floor() as usize;
    (0..=n).map(|k| k as f64 * interval).collect()
}

/// Independent random stream keyed by `(seed, replicate, robot)`.
///
/// The key is the ChaCha8 seed itself, so equal keys reproduce the exact
/// sample sequence and distinct keys select unrelated cipher streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, replicate: u64, robot: u64) -> Self {
        Self::with_domain(seed, replicate, robot, 0)
    }

    /// Same as [`RngStream::new`] with an extra domain tag, used to keep e.g.
    /// calibration ensembles apart from measurement ensembles.
    pub fn with_domain(seed: u64, replicate: u64, robot: u64, domain: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&replicate.to_le_bytes());
        key[16..24].copy_from_slice(&robot.to_le_bytes());
        key[24..].copy_from_slice(&domain.to_le_bytes());
        Self {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    /// Uniform sample on the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        open01(self)
    }
}

/// Uniform on (0, 1) from 52 random mantissa bits, never returning 0 or 1.
pub fn open01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let bits = rng.next_u64() >> 12;
    (bits as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_grid() -> GridSpec {
        GridSpec::with_cell_size(Arena::reference(), 0.01).unwrap()
    }

    #[test]
    fn corner_cells() {
        let g = reference_grid();
        let a = Arena::reference();
        assert_eq!(g.nx, 180);
        assert_eq!(g.ny, 220);
        assert_eq!(g.cell_index(Vec2::new(a.x_min, a.y_min)).unwrap(), (0, 0));
        assert_eq!(
            g.cell_index(Vec2::new(a.x_max, a.y_max)).unwrap(),
            (g.nx - 1, g.ny - 1)
        );
    }

    #[test]
    fn origin_maps_to_center_cell() {
        let g = reference_grid();
        assert_eq!(g.cell_index(Vec2::ZERO).unwrap(), (90, 110));
        assert_eq!(cell_index(Vec2::ZERO, &g, &Arena::reference()).unwrap(), (90, 110));
    }

    #[test]
    fn outside_point_is_rejected() {
        let g = reference_grid();
        assert!(matches!(
            g.cell_index(Vec2::new(0.95, 0.0)),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn degenerate_arena_rejected() {
        assert!(Arena::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Arena::new(0.0, 1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn ring_single_robot() {
        let p = ring_placement(1, 0.0, Vec2::new(0.3, -0.2)).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].position(), Vec2::new(0.3, -0.2));
        assert_eq!(p[0].heading, 0.0);
    }

    #[test]
    fn ring_four_robots_face_outward() {
        let p = ring_placement(4, 0.25, Vec2::ZERO).unwrap();
        let expected = [0.0, PI / 2.0, -PI, -PI / 2.0];
        for (pose, &h) in p.iter().zip(expected.iter()) {
            assert!((pose.position().norm() - 0.125).abs() < 1e-15);
            assert!((pose.heading - h).abs() < 1e-12, "{} vs {}", pose.heading, h);
        }
    }

    #[test]
    fn five_robot_ring_matches_reference_diameter() {
        assert_eq!(reference_ring_diameter(5), 0.25);
        assert_eq!(reference_ring_diameter(20), 0.55);
        let p = ring_placement(5, reference_ring_diameter(5), Vec2::ZERO).unwrap();
        for pose in &p {
            assert!((pose.position().norm() - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn wrap_angle_range() {
        for k in -20..20 {
            let w = wrap_angle(k as f64 * 0.7);
            assert!((-PI..PI).contains(&w));
        }
        assert_eq!(wrap_angle(PI), -PI);
    }

    #[test]
    fn config_json_keys() {
        let cfg = ExperimentConfig::reference(5, 1.3, Mode::Webots);
        let v: serde_json::Value = serde_json::from_str(&cfg.to_json().unwrap()).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "alpha",
                "duration_s",
                "mode",
                "n_robots",
                "placement",
                "record_interval_s",
                "replicates",
                "seed"
            ]
        );
        assert_eq!(v["placement"]["type"], "ring");
        assert_eq!(v["placement"]["diameter_m"], 0.25);
        assert_eq!(ExperimentConfig::from_json(&cfg.to_json().unwrap()).unwrap(), cfg);
    }

    #[test]
    fn config_rejects_bad_alpha_with_key() {
        let mut cfg = ExperimentConfig::reference(5, 1.3, Mode::Kinetic);
        cfg.alpha = 2.0;
        match cfg.validate() {
            Err(Error::InvalidConfig { key, .. }) => assert_eq!(key, "alpha"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rng_streams_reproducible_and_distinct() {
        let mut a = RngStream::new(7, 1, 2);
        let mut b = RngStream::new(7, 1, 2);
        let mut c = RngStream::new(7, 1, 3);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn open01_never_hits_endpoints() {
        let mut r = RngStream::new(0, 0, 0);
        for _ in 0..10_000 {
            let u = r.open01();
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
