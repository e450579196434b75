use crate::agents::collision::{elastic_collision, reflect_wall};
use crate::agents::coverage::HitTimeMap;
use crate::error::{invalid, Result};
use crate::metrics::MetricSeries;
use crate::model::{wrap_angle, Arena, GridSpec, Mode, Pose, RngStream, Vec2};
use crate::params::ModelParams;
use crate::sampling::{sample_run_time, sample_step_vector, sample_turn, KineticParams, TurnKernel};

/// Controller state of one robot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phase {
    /// Turning on the spot toward `target`; `remaining` radians left.
    Rotating { target: f64, remaining: f64 },
    /// Driving straight; `remaining` meters left in the current leg.
    Moving { remaining: f64 },
    Stopped,
}

#[derive(Debug, Clone)]
pub struct RobotState {
    pub id: usize,
    pub pos: Vec2,
    /// Heading in `[-pi, pi)`.
    pub heading: f64,
    pub phase: Phase,
    /// Kinetic mode: time left in the current run (s).
    pub run_remaining: f64,
    /// Controller mode: sampled length of the current leg and distance driven so far.
    pub leg_length: f64,
    pub leg_travelled: f64,
    rng: RngStream,
}

impl RobotState {
    pub fn new(id: usize, pose: Pose, rng: RngStream) -> Self {
        Self {
            id,
            pos: pose.position(),
            heading: wrap_angle(pose.heading),
            phase: Phase::Stopped,
            run_remaining: 0.0,
            leg_length: 0.0,
            leg_travelled: 0.0,
            rng,
        }
    }

    pub fn direction(&self) -> Vec2 {
        Vec2::from_angle(self.heading)
    }

    /// Starts a controller leg toward `displacement` (relative to the robot).
    pub fn begin_leg(&mut self, displacement: Vec2) {
        let target = wrap_angle(displacement.angle());
        self.leg_length = displacement.norm();
        self.leg_travelled = 0.0;
        self.phase = Phase::Rotating {
            target,
            remaining: wrap_angle(target - self.heading).abs(),
        };
    }

    pub fn rng_mut(&mut self) -> &mut RngStream {
        &mut self.rng
    }
}

/// Everything a world needs besides the initial poses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSettings {
    pub mode: Mode,
    pub kinetics: KineticParams,
    pub kernel: TurnKernel,
    pub dt: f64,
    pub rotation_speed: f64,
    pub step_scale: f64,
    pub grid: GridSpec,
}

impl SimSettings {
    pub fn from_params(params: &ModelParams, alpha: f64, mode: Mode) -> Result<Self> {
        let s = Self {
            mode,
            kinetics: params.agent_kinetics(alpha, mode),
            kernel: params.turn_kernel,
            dt: params.dt_s,
            rotation_speed: params.rotation_speed_rad_s,
            step_scale: params.step_scale_m,
            grid: params.coverage_grid()?,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(invalid("dt", format!("tick length must be positive, got {}", self.dt)));
        }
        if !(self.rotation_speed > 0.0) {
            return Err(invalid("rotation_speed", "must be positive"));
        }
        self.kinetics.validate()?;
        self.kernel.validate()
    }

    pub fn arena(&self) -> Arena {
        self.grid.arena
    }

    /// Region available to robot centres.
    pub fn bounds(&self) -> Arena {
        match self.mode {
            Mode::Point => self.arena(),
            _ => self.arena().shrunk(0.5 * self.kinetics.rho_diam),
        }
    }

    fn collisions(&self) -> bool {
        self.mode == Mode::Kinetic
    }
}

/// One replicate of the swarm.
#[derive(Debug, Clone)]
pub struct SimWorld {
    pub robots: Vec<RobotState>,
    pub settings: SimSettings,
    pub hit_map: HitTimeMap,
    pub clock: f64,
    ticks: u64,
    bounds: Arena,
}

const MAX_EVENTS_PER_TICK: usize = 64;

impl SimWorld {
    /// Builds a world with robot `k` drawing from stream `(seed, replicate, k)`
    /// and records the initial cells at `t = 0`.
    pub fn new(settings: SimSettings, poses: &[Pose], seed: u64, replicate: u64) -> Result<Self> {
        Self::new_in_domain(settings, poses, seed, replicate, 0)
    }

    /// [`SimWorld::new`] drawing from streams tagged with `domain`.
    pub fn new_in_domain(settings: SimSettings, poses: &[Pose], seed: u64, replicate: u64, domain: u64) -> Result<Self> {
        settings.validate()?;
        let bounds = settings.bounds();
        let mut robots = Vec::with_capacity(poses.len());
        for (k, pose) in poses.iter().enumerate() {
            if !bounds.contains(pose.position()) {
                return Err(invalid(
                    "placement",
                    format!("robot {k} at ({}, {}) is not inside the arena", pose.x, pose.y),
                ));
            }
            let mut r = RobotState::new(k, *pose, RngStream::with_domain(seed, replicate, k as u64, domain));
            if settings.mode != Mode::Webots {
                r.run_remaining = sample_run_time(&settings.kinetics, &mut r.rng);
                r.phase = Phase::Moving {
                    remaining: f64::INFINITY,
                };
            }
            robots.push(r);
        }
        let mut world = Self {
            robots,
            settings,
            hit_map: HitTimeMap::new(settings.grid),
            clock: 0.0,
            ticks: 0,
            bounds,
        };
        world.record_coverage()?;
        Ok(world)
    }

    /// Advances one tick with the engine selected by the mode.
    pub fn step(&mut self) -> Result<()> {
        match self.settings.mode {
            Mode::Webots => self.step_webots(),
            Mode::Kinetic | Mode::Point => self.step_kinetic(),
        }
    }

    fn advance_clock(&mut self) {
        self.ticks += 1;
        self.clock = self.ticks as f64 * self.settings.dt;
    }

    /// Rotate-then-drive controller: sample a target, turn toward it at the
    /// rotation speed, drive until the leg ends or an obstacle appears ahead.
    pub fn step_webots(&mut self) -> Result<()> {
        if self.settings.mode != Mode::Webots {
            return Err(invalid("mode", "step_webots needs the webots mode"));
        }
        let s = self.settings;
        let speed = s.kinetics.speed_c;
        for i in 0..self.robots.len() {
            let mut budget = s.dt;
            for _ in 0..MAX_EVENTS_PER_TICK {
                // leftovers of floating-point division are not worth a new leg
                if budget <= 1e-12 * s.dt {
                    break;
                }
                match self.robots[i].phase {
                    Phase::Stopped => {
                        let r = &mut self.robots[i];
                        let d = sample_step_vector(s.kinetics.alpha, s.step_scale, &mut r.rng);
                        r.begin_leg(d);
                    }
                    Phase::Rotating { target, remaining } => {
                        let r = &mut self.robots[i];
                        let needed = remaining / s.rotation_speed;
                        if needed <= budget {
                            budget -= needed;
                            r.heading = target;
                            r.phase = Phase::Moving {
                                remaining: (r.leg_length - r.leg_travelled).max(0.0),
                            };
                        } else {
                            let turn = s.rotation_speed * budget;
                            let sign = wrap_angle(target - r.heading).signum();
                            r.heading = wrap_angle(r.heading + sign * turn);
                            r.phase = Phase::Rotating {
                                target,
                                remaining: remaining - turn,
                            };
                            budget = 0.0;
                        }
                    }
                    Phase::Moving { remaining } => {
                        if remaining <= 0.0 {
                            self.robots[i].phase = Phase::Stopped;
                            continue;
                        }
                        if self.obstacle_ahead(i) {
                            self.robots[i].phase = Phase::Stopped;
                            break;
                        }
                        let step = remaining.min(speed * budget);
                        let dir = self.robots[i].direction();
                        let proposed = self.robots[i].pos + dir * step;
                        if !self.bounds.contains(proposed) || self.overlaps_any(i, proposed) {
                            self.robots[i].phase = Phase::Stopped;
                            break;
                        }
                        let r = &mut self.robots[i];
                        r.pos = proposed;
                        r.leg_travelled += step;
                        budget -= step / speed;
                        let left = remaining - step;
                        r.phase = if left <= 1e-15 {
                            Phase::Stopped
                        } else {
                            Phase::Moving { remaining: left }
                        };
                    }
                }
            }
        }
        self.advance_clock();
        self.record_coverage()
    }

    /// Another robot's centre within `sensor_range + rho/2`, or a wall within
    /// `sensor_range` of the rim, in the half-plane the robot is driving into.
    fn obstacle_ahead(&self, i: usize) -> bool {
        let k = &self.settings.kinetics;
        let me = &self.robots[i];
        let dir = me.direction();
        let reach = k.sensor_range + 0.5 * k.rho_diam;
        let a = self.settings.arena();
        let walls = [
            (me.pos.x - a.x_min, Vec2::new(-1.0, 0.0)),
            (a.x_max - me.pos.x, Vec2::new(1.0, 0.0)),
            (me.pos.y - a.y_min, Vec2::new(0.0, -1.0)),
            (a.y_max - me.pos.y, Vec2::new(0.0, 1.0)),
        ];
        if walls.iter().any(|&(dist, out)| dist <= reach && dir.dot(out) > 0.0) {
            return true;
        }
        self.robots.iter().any(|other| {
            if other.id == me.id {
                return false;
            }
            let rel = other.pos - me.pos;
            rel.norm_sq() <= reach * reach && rel.dot(dir) > 0.0
        })
    }

    fn overlaps_any(&self, i: usize, p: Vec2) -> bool {
        let rho = self.settings.kinetics.rho_diam;
        self.robots
            .iter()
            .any(|o| o.id != i && (o.pos - p).norm_sq() < rho * rho)
    }

    /// Velocity-jump step: straight runs at constant speed, instantaneous
    /// reorientation when the run time expires, specular walls and (in the
    /// kinetic mode) elastic robot-robot collisions.
    pub fn step_kinetic(&mut self) -> Result<()> {
        if self.settings.mode == Mode::Webots {
            return Err(invalid("mode", "step_kinetic needs the kinetic or point mode"));
        }
        let s = self.settings;
        let bounds = self.bounds;
        for r in &mut self.robots {
            let mut budget = s.dt;
            while budget > 0.0 {
                let run = r.run_remaining.min(budget);
                let (pos, dir) = reflect_wall(r.pos + r.direction() * (s.kinetics.speed_c * run), r.direction(), &bounds);
                r.pos = pos;
                if dir != r.direction() {
                    r.heading = wrap_angle(dir.angle());
                }
                budget -= run;
                r.run_remaining -= run;
                if r.run_remaining <= 0.0 {
                    r.heading = sample_turn(&s.kernel, r.heading, &mut r.rng);
                    r.run_remaining = sample_run_time(&s.kinetics, &mut r.rng);
                }
            }
        }
        if s.collisions() {
            self.resolve_collisions()?;
        }
        self.advance_clock();
        self.record_coverage()
    }

    /// Pairwise resolution in index order. Overlapping pairs are rewound
    /// along their straight paths to the contact instant, reflected and
    /// advanced again; pairs that cannot be rewound inside the tick are pushed
    /// apart along the line of centres.
    fn resolve_collisions(&mut self) -> Result<()> {
        let rho = self.settings.kinetics.rho_diam;
        let c = self.settings.kinetics.speed_c;
        let dt = self.settings.dt;
        let bounds = self.bounds;
        let n = self.robots.len();
        for pass in 0..32 {
            let mut clean = true;
            for i in 0..n {
                for j in (i + 1)..n {
                    let r = self.robots[i].pos - self.robots[j].pos;
                    if r.norm_sq() >= rho * rho {
                        continue;
                    }
                    clean = false;
                    let vi = self.robots[i].direction() * c;
                    let vj = self.robots[j].direction() * c;
                    let w = vi - vj;
                    let ww = w.norm_sq();
                    let rw = r.dot(w);
                    let disc = rw * rw - ww * (r.norm_sq() - rho * rho);
                    let rewind = if ww > 1e-24 && disc >= 0.0 && pass == 0 {
                        let s = (rw + disc.sqrt()) / ww;
                        (s > 0.0 && s <= dt).then_some(s)
                    } else {
                        None
                    };
                    match rewind {
                        Some(s) => {
                            let pi = self.robots[i].pos - vi * s;
                            let pj = self.robots[j].pos - vj * s;
                            let gap = pi - pj;
                            let nu = gap * (1.0 / gap.norm());
                            let di = self.robots[i].direction();
                            let dj = self.robots[j].direction();
                            let di = if di.dot(nu) < 0.0 { elastic_collision(di, nu)? } else { di };
                            let dj = if dj.dot(nu) > 0.0 { elastic_collision(dj, nu)? } else { dj };
                            let (pi, di) = reflect_wall(pi + di * (c * s), di, &bounds);
                            let (pj, dj) = reflect_wall(pj + dj * (c * s), dj, &bounds);
                            self.set_motion(i, pi, di);
                            self.set_motion(j, pj, dj);
                        }
                        None => {
                            let d = r.norm();
                            let nu = if d > 0.0 { r * (1.0 / d) } else { Vec2::new(1.0, 0.0) };
                            let push = nu * (0.5 * (rho - d) * (1.0 + 1e-9) + 1e-12);
                            let di = self.robots[i].direction();
                            let dj = self.robots[j].direction();
                            let di = if di.dot(nu) < 0.0 { elastic_collision(di, nu)? } else { di };
                            let dj = if dj.dot(nu) > 0.0 { elastic_collision(dj, nu)? } else { dj };
                            let (pi, di) = reflect_wall(self.robots[i].pos + push, di, &bounds);
                            let (pj, dj) = reflect_wall(self.robots[j].pos - push, dj, &bounds);
                            self.set_motion(i, pi, di);
                            self.set_motion(j, pj, dj);
                        }
                    }
                }
            }
            if clean {
                return Ok(());
            }
        }
        Ok(())
    }

    fn set_motion(&mut self, i: usize, pos: Vec2, dir: Vec2) {
        let r = &mut self.robots[i];
        r.pos = pos;
        r.heading = wrap_angle(dir.angle());
    }

    /// Stamps the current clock into every cell holding a robot centre.
    pub fn record_coverage(&mut self) -> Result<()> {
        for r in &self.robots {
            self.hit_map.visit(r.pos, self.clock)?;
        }
        Ok(())
    }

    /// Fraction of coverage cells visited so far.
    pub fn coverage(&self) -> f64 {
        self.hit_map.visited_cells() as f64 / self.settings.grid.len() as f64
    }

    /// Runs to `duration`, sampling coverage at `0, interval, 2 interval, ...`.
    pub fn run(&mut self, duration: f64, interval: f64) -> Result<MetricSeries> {
        if !(interval > 0.0) {
            return Err(invalid("record_interval", "must be positive"));
        }
        let times = crate::model::record_times(duration, interval);
        let dt = self.settings.dt;
        let mut values = Vec::with_capacity(times.len());
        for &t in &times {
            let target_ticks = (t / dt - 1e-9).ceil().max(0.0) as u64;
            while self.ticks < target_ticks {
                self.step()?;
            }
            values.push(self.coverage());
        }
        MetricSeries::new(times, values)
    }

    pub fn min_pair_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (k, a) in self.robots.iter().enumerate() {
            for b in &self.robots[k + 1..] {
                best = best.min((a.pos - b.pos).norm());
            }
        }
        best
    }

    pub fn bounds(&self) -> Arena {
        self.bounds
    }
}
