use std::f64::consts::PI;

use levy_swarm::agents::{elastic_collision, reflect_wall, SimSettings, SimWorld};
use levy_swarm::harness::continuum_coefficients;
use levy_swarm::harness::io::{read_rows, write_rows, CoverageRow};
use levy_swarm::metrics::{ensemble_stats, hitting_time_analytic, time_to_coverage, MetricSeries, TargetTile};
use levy_swarm::model::{ring_placement, wrap_angle, Arena, Mode, Vec2};
use levy_swarm::params::ModelParams;
use levy_swarm::sampling::{apply_turn_operator, TurnKernel};
use proptest::prelude::*;

fn unit(theta: f64) -> Vec2 {
    Vec2::from_angle(theta)
}

proptest! {
    #[test]
    fn collision_keeps_speed(a in -PI..PI, b in -PI..PI, speed in 0.01f64..10.0) {
        let out = elastic_collision(unit(a) * speed, unit(b)).unwrap();
        prop_assert!((out.norm() - speed).abs() < 1e-12 * speed.max(1.0));
        let back = elastic_collision(out, unit(b)).unwrap();
        prop_assert!((back - unit(a) * speed).norm() < 1e-12 * speed.max(1.0));
    }

    #[test]
    fn reflection_lands_inside(x in -10.0f64..10.0, y in -10.0f64..10.0, h in -PI..PI) {
        let arena = Arena::reference();
        let (p, d) = reflect_wall(Vec2::new(x, y), unit(h), &arena);
        prop_assert!(arena.contains(p));
        prop_assert!((d.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_stays_in_range(t in -1e4f64..1e4) {
        let w = wrap_angle(t);
        prop_assert!((-PI..PI).contains(&w));
        let k = (t - w) / (2.0 * PI);
        prop_assert!((k - k.round()).abs() < 1e-9);
    }

    #[test]
    fn turn_operator_keeps_mass(
        density in prop::collection::vec(0.0f64..5.0, 8..128),
        kappa in 0.0f64..20.0,
    ) {
        let total: f64 = density.iter().sum();
        for kernel in [TurnKernel::Uniform, TurnKernel::VonMises { kappa }] {
            let out = apply_turn_operator(&kernel, &density).unwrap();
            prop_assert_eq!(out.len(), density.len());
            prop_assert!((out.iter().sum::<f64>() - total).abs() <= 1e-12 * total.max(1.0));
            prop_assert!(out.iter().all(|v| *v >= -1e-12));
        }
    }

    #[test]
    fn analytic_time_grows_with_threshold_and_distance(
        d1 in 0.001f64..0.5, d2 in 0.001f64..0.5, alpha in 1.05f64..1.95, r in 0.1f64..1.0,
    ) {
        let k = continuum_coefficients(alpha, &ModelParams::default()).unwrap();
        let tile = TargetTile { center: Vec2::new(0.0, 0.0), side: 0.1 };
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        let near = [Vec2::new(r, 0.0)];
        let far = [Vec2::new(r * 1.5, 0.0)];
        let t_lo = hitting_time_analytic(&tile, &near, &k, lo).unwrap();
        let t_hi = hitting_time_analytic(&tile, &near, &k, hi).unwrap();
        prop_assert!(t_lo <= t_hi);
        prop_assert!(hitting_time_analytic(&tile, &far, &k, lo).unwrap() > t_lo);
    }

    #[test]
    fn coverage_level_times_are_ordered(
        steps in prop::collection::vec(0.0f64..0.05, 2..80), a in 0.0f64..1.0, b in 0.0f64..1.0,
    ) {
        let mut acc = 0.0;
        let values: Vec<f64> = steps.iter().map(|s| { acc = (acc + s).min(1.0); acc }).collect();
        let times = (0..values.len()).map(|k| k as f64).collect();
        let series = MetricSeries::new(times, values).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let t = |l| time_to_coverage(&series, l).unwrap().unwrap_or(f64::INFINITY);
        prop_assert!(t(lo) <= t(hi));
    }

    #[test]
    fn copies_have_zero_spread(values in prop::collection::vec(0.0f64..1.0, 1..40), copies in 2usize..6) {
        let times: Vec<f64> = (0..values.len()).map(|k| k as f64).collect();
        let s = MetricSeries::new(times, values.clone()).unwrap();
        let stats = ensemble_stats(&vec![s; copies]).unwrap();
        for (m, v) in stats.mean.iter().zip(&values) {
            prop_assert!((m - v).abs() <= 4.0 * f64::EPSILON);
        }
        prop_assert!(stats.std.iter().all(|v| *v < 1e-15));
    }

    #[test]
    fn coverage_rows_round_trip(cov in prop::collection::vec((0usize..100, 0.0f64..1.0), 1..50)) {
        let rows: Vec<CoverageRow> = cov.iter().enumerate()
            .map(|(k, &(run_id, coverage))| CoverageRow { time_s: k as f64 * 0.1, run_id, coverage })
            .collect();
        let mut buf = Vec::new();
        write_rows(&rows, &mut buf).unwrap();
        prop_assert_eq!(read_rows::<CoverageRow, _>(&buf[..]).unwrap(), rows);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn worlds_respect_invariants(seed in any::<u64>(), alpha in 1.1f64..1.9, mode_ix in 0usize..3) {
        let mode = [Mode::Webots, Mode::Kinetic, Mode::Point][mode_ix];
        let params = ModelParams::default();
        let settings = SimSettings::from_params(&params, alpha, mode).unwrap();
        let poses = ring_placement(10, 0.3, Arena::reference().center()).unwrap();
        let mut world = SimWorld::new(settings.clone(), &poses, seed, 0).unwrap();
        let mut twin = SimWorld::new(settings, &poses, seed, 0).unwrap();
        let bounds = world.bounds();
        let mut last = world.coverage();
        for _ in 0..400 {
            world.step().unwrap();
            twin.step().unwrap();
            world.record_coverage().unwrap();
            let c = world.coverage();
            prop_assert!(c >= last);
            last = c;
            for r in &world.robots {
                prop_assert!(bounds.contains(r.pos));
                if mode == Mode::Webots {
                    prop_assert!(r.leg_travelled <= r.leg_length + 1e-9);
                }
            }
            if mode != Mode::Point {
                prop_assert!(world.min_pair_distance() >= params.robot_diameter_m - 1e-9);
            }
        }
        for (a, b) in world.robots.iter().zip(&twin.robots) {
            prop_assert_eq!(a.pos, b.pos);
            prop_assert_eq!(a.heading, b.heading);
        }
    }
}
