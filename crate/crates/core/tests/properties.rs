use std::f64::consts::PI;

use abflux::gauge::{
    gauge_transform, loop_flux, plaquette_flux, rectangle_path, string_gauge, symmetric_gauge, wrap_angle,
    GaugeFunction,
};
use abflux::grid::{bump_packet, gaussian_packet, make_grid, superpose, Grid2D, WaveField};
use abflux::io::{parse_config, read_snapshot, write_snapshot, ScenarioConfig};
use abflux::observables::{current, density, expectation_velocity, modular_momentum_expectation};
use abflux::propagate::{evolve_lattice, PropagatorConfig};
use abflux::rotor::{
    coherent_angular_state, entanglement_entropy, evolve_rotor, shift_unitary, RotorParams, RotorState,
};
use abflux::scenario::ScenarioKind;
use abflux::Complex64;
use proptest::prelude::*;

fn grid() -> Grid2D {
    make_grid(224, 224, 0.125, 0.125, -13.9375, -13.9375).unwrap()
}

fn packet(c: (f64, f64), sigma: f64, k: (f64, f64)) -> WaveField {
    gaussian_packet(&grid(), c, sigma, k).unwrap()
}

fn smooth_chi(g: &Grid2D, a: f64, b: f64, c: f64) -> GaugeFunction {
    GaugeFunction::from_fn(g, |x, y| a * x + b * (c * y).sin() + 0.1 * x * y).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn packets_are_normalized(cx in -2.0..2.0f64, cy in -2.0..2.0f64, sigma in 0.8..1.2f64, kx in -2.0..2.0f64, ky in -2.0..2.0f64) {
        let f = packet((cx, cy), sigma, (kx, ky));
        prop_assert!((f.norm_sq() - 1.0).abs() < 1e-12);
        prop_assert!(density(&f).values.iter().all(|r| *r >= 0.0));
    }

    #[test]
    fn disjoint_superpositions_hide_their_relative_phase(beta in 0.0..2.0 * PI, sep in 2.6..5.0f64) {
        let g = grid();
        let a = bump_packet(&g, (-sep / 2.0, 0.0), 1.0).unwrap();
        let b = bump_packet(&g, (sep / 2.0, 0.0), 1.0).unwrap();
        let z = abflux::gauge::zero_gauge(&g);
        let f0 = superpose(&a, &b, 1.0, 1.0, 0.0).unwrap();
        let fb = superpose(&a, &b, 1.0, 1.0, beta).unwrap();
        prop_assert!(max_diff(&density(&f0).values, &density(&fb).values) <= 1e-13);
        let (j0, jb) = (current(&f0, &z).unwrap(), current(&fb, &z).unwrap());
        prop_assert!(max_diff(&j0.x, &jb.x) <= 1e-13 && max_diff(&j0.y, &jb.y) <= 1e-13);
    }

    #[test]
    fn modular_momentum_is_bounded_and_phase_blind(theta in 0.0..2.0 * PI, rows in -6isize..6, kx in -1.0..1.0f64) {
        let a = packet((-2.0, 0.0), 1.0, (kx, 0.5));
        let b = packet((2.0, 0.0), 1.0, (kx, 0.5));
        let f = superpose(&a, &b, 1.0, 1.0, 0.3).unwrap();
        let t = modular_momentum_expectation(&f, 4.0).unwrap();
        prop_assert!(t.norm() <= 1.0 + 1e-12);
        let tp = modular_momentum_expectation(&f.clone().with_global_phase(theta), 4.0).unwrap();
        prop_assert!((tp - t).norm() < 1e-13);
        let ty = modular_momentum_expectation(&f.translated_rows(rows), 4.0).unwrap();
        prop_assert!((ty - t).norm() < 1e-12);
    }

    #[test]
    fn integrated_current_is_mean_velocity(kx in -2.0..2.0f64, ky in -2.0..2.0f64, alpha in -3.0..3.0f64) {
        let g = grid();
        let f = gaussian_packet(&g, (1.5, 2.0), 1.2, (kx, ky)).unwrap();
        let gauge = symmetric_gauge(&g, alpha, 1.0).unwrap();
        let (jx, jy) = current(&f, &gauge).unwrap().integral();
        let (vx, vy) = expectation_velocity(&f, &gauge).unwrap();
        prop_assert!((jx - vx).abs() < 1e-8 && (jy - vy).abs() < 1e-8);
    }

    #[test]
    fn gauge_transforms_preserve_observables(a in -1.0..1.0f64, b in -2.0..2.0f64, c in 0.1..1.0f64, alpha in -3.0..3.0f64) {
        let g = grid();
        let f = gaussian_packet(&g, (0.5, -1.0), 1.2, (1.0, -0.5)).unwrap();
        let gauge = string_gauge(&g, alpha).unwrap();
        let (f2, gauge2) = gauge_transform(&f, &gauge, &smooth_chi(&g, a, b, c)).unwrap();
        for j in 0..g.ny - 1 {
            for i in 0..g.nx - 1 {
                let (p, q) = (plaquette_flux(&gauge, i, j).unwrap(), plaquette_flux(&gauge2, i, j).unwrap());
                prop_assert!(wrap_angle(p.raw - q.raw).abs() <= 1e-12);
            }
        }
        for (x, y) in density(&f).values.iter().zip(&density(&f2).values) {
            prop_assert!((x - y).abs() <= 4.0 * f64::EPSILON * x.abs());
        }
        let (j1, j2) = (current(&f, &gauge).unwrap(), current(&f2, &gauge2).unwrap());
        prop_assert!(max_diff(&j1.x, &j2.x) <= 1e-10 && max_diff(&j1.y, &j2.y) <= 1e-10);
        let (v1, v2) = (expectation_velocity(&f, &gauge).unwrap(), expectation_velocity(&f2, &gauge2).unwrap());
        prop_assert!((v1.0 - v2.0).abs() <= 1e-10 && (v1.1 - v2.1).abs() <= 1e-10);
    }

    #[test]
    fn loop_phases_count_the_enclosed_flux(alpha in -3.0..3.0f64, i0 in 4usize..80, j0 in 4usize..80, i1 in 144usize..220, j1 in 144usize..220) {
        let g = grid();
        let s = string_gauge(&g, alpha).unwrap();
        prop_assert!(s.link_x().iter().all(|p| *p == 0.0));
        let y = symmetric_gauge(&g, alpha, 1.0).unwrap();
        for gauge in [&s, &y] {
            let around = loop_flux(gauge, &rectangle_path(i0, j0, i1, j1)).unwrap();
            prop_assert!(wrap_angle(around - alpha).abs() < 1e-10);
            let aside = loop_flux(gauge, &rectangle_path(i0, j0, i0 + 24, j0 + 24)).unwrap();
            prop_assert!(wrap_angle(aside).abs() < 1e-10);
        }
    }

    #[test]
    fn snapshots_round_trip(cx in -2.0..2.0f64, t in 0.0..10.0f64) {
        let f = packet((cx, 0.0), 1.0, (0.7, -1.1));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.snap");
        write_snapshot(&f, "string(alpha=1.3)", t, &p).unwrap();
        let (back, header) = read_snapshot(&p).unwrap();
        prop_assert_eq!(back.amplitudes(), f.amplitudes());
        prop_assert_eq!(back.grid(), f.grid());
        prop_assert_eq!(header.t, t);
    }

    #[test]
    fn config_echo_round_trips(dt in 1e-4..1e-2f64, sigma in 0.5..3.0f64, alpha in -6.0..6.0f64, nx in 16usize..600) {
        let mut cfg = ScenarioConfig::defaults(ScenarioKind::InstantaneousAspect);
        cfg.dt = dt;
        cfg.sigma = sigma;
        cfg.alpha = vec![alpha, alpha / 3.0];
        cfg.nx = nx;
        let again = parse_config(&cfg.echo()).unwrap();
        prop_assert_eq!(again, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn lattice_steps_are_unitary(alpha in -3.0..3.0f64, kx in -1.5..1.5f64, ky in -1.5..1.5f64) {
        let g = grid();
        let f = gaussian_packet(&g, (1.0, 2.5), 1.0, (kx, ky)).unwrap();
        let run = evolve_lattice(&f, &string_gauge(&g, alpha).unwrap(), &PropagatorConfig::new(0.01, 0.5)).unwrap();
        prop_assert!(run.norm_drift < 1e-10);
    }
}

fn random_rotor_state(seed: &[f64], p: RotorParams) -> RotorState {
    let electron = coherent_angular_state(seed[0], 3.0, 24).unwrap();
    let branches: Vec<(i64, Complex64, Vec<Complex64>)> = (0..3)
        .map(|k| {
            let mut e = electron.clone();
            e.iter_mut().enumerate().for_each(|(m, c)| *c *= Complex64::from_polar(1.0, seed[k + 1] * m as f64));
            (k as i64 - 1, Complex64::from_polar(seed[4 + k], seed[1 + k]), e)
        })
        .collect();
    let refs: Vec<(i64, Complex64, &[Complex64])> = branches.iter().map(|(n, a, e)| (*n, *a, e.as_slice())).collect();
    RotorState::from_branches(p, 8, &refs).unwrap()
}

fn state_distance(a: &RotorState, b: &RotorState) -> f64 {
    a.coefficients().iter().zip(b.coefficients()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rotor_dynamics_is_unitary_and_shift_symmetric(
        seed in prop::collection::vec(0.1..1.0f64, 7),
        lambda in 0.01..0.3f64,
        t in 0.0..50.0f64,
        delta in -PI..PI,
    ) {
        let p = RotorParams::new(10.0, 1.0, lambda).unwrap();
        let s = random_rotor_state(&seed, p);
        let u = evolve_rotor(&s, t);
        let v = shift_unitary(&s, delta);
        prop_assert!((u.norm_sq() - 1.0).abs() < 1e-12 && (v.norm_sq() - 1.0).abs() < 1e-12);
        let a = evolve_rotor(&shift_unitary(&s, delta), t);
        let b = shift_unitary(&evolve_rotor(&s, t), delta);
        prop_assert!(state_distance(&a, &b) < 1e-12);
    }

    #[test]
    fn entropy_ignores_local_phases(seed in prop::collection::vec(0.1..1.0f64, 7), delta in -PI..PI, t in 0.0..20.0f64) {
        let p = RotorParams::new(10.0, 1.0, 0.1).unwrap();
        let s = evolve_rotor(&random_rotor_state(&seed, p), t);
        let base = entanglement_entropy(&s);
        let phased: Vec<Complex64> = s
            .iter()
            .map(|(n, m, c)| c * Complex64::from_polar(1.0, delta * (n * n) as f64 - 0.7 * delta * m as f64))
            .collect();
        let q = RotorState::from_coefficients(p, s.nc(), s.ne(), phased).unwrap();
        prop_assert!((entanglement_entropy(&q) - base).abs() < 1e-10);
    }
}
