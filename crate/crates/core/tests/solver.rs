use std::f64::consts::PI;

use nsverify::fields::{ops, GridSpec, VectorField};
use nsverify::solver::{self, presets, Forcing, Integrator, Scenario};
use nsverify::Error;

fn tg_error(n: usize, mu: f64, horizon: f64, dt: f64) -> f64 {
    let sc = presets::taylor_green(n, mu, horizon, dt).unwrap();
    let traj = solver::run(&sc).unwrap();
    let last = traj.last();
    let exact = presets::taylor_green_velocity(sc.grid(), mu, last.time);
    (&last.velocity - &exact).max_abs()
}

#[test]
fn rest_state_stays_at_rest() {
    let g = presets::taylor_green_grid(16).unwrap();
    let sc = Scenario::new("rest", VectorField::zeros(g), 0.1, 0.1, 0.01).unwrap();
    let traj = solver::run(&sc).unwrap();
    assert_eq!(traj.len(), 11);
    for s in traj.states() {
        assert_eq!(s.velocity.max_abs(), 0.0);
        assert_eq!(s.pressure.max_abs(), 0.0);
    }
}

#[test]
fn zero_horizon_keeps_only_the_initial_state() {
    let sc = presets::taylor_green(16, 0.01, 0.0, 0.01).unwrap();
    let traj = solver::run(&sc).unwrap();
    assert_eq!(traj.len(), 1);
    assert_eq!(&traj.states()[0].velocity, sc.initial());
}

#[test]
fn taylor_green_matches_the_analytic_solution() {
    let mu = 0.01;
    let sc = presets::taylor_green(64, mu, 1.0, 1e-3).unwrap();
    let mut energies = Vec::new();
    let traj = solver::run_with(&sc, 100, |_, s| {
        energies.push((
            s.time,
            ops::integral(&ops::kinetic_energy_density(&s.velocity)),
        ));
    })
    .unwrap();
    assert_eq!(traj.len(), 11);
    let last = traj.last();
    assert!((last.time - 1.0).abs() < 1e-15);
    let err = (&last.velocity - &presets::taylor_green_velocity(sc.grid(), mu, 1.0)).max_abs();
    assert!(err <= 1e-5, "velocity error {err}");
    for (t, e) in energies {
        let exact = presets::taylor_green_energy(mu, t);
        assert!((e - exact).abs() <= 1e-3 * exact, "t = {t}: {e} vs {exact}");
    }
    let p_exact = presets::taylor_green_pressure(sc.grid(), mu, last.pressure_time);
    assert!((&last.pressure - &p_exact).max_abs() < 1e-8);
    assert!(ops::mean(&last.pressure).abs() < 1e-12);
    assert!(ops::divergence(&last.velocity).max_abs() < 1e-9);
}

#[test]
fn synchronized_pressure_matches_the_state_time() {
    let mu = 0.05;
    for (integrator, stride) in [
        (Integrator::Rk2, 1),
        (Integrator::Rk2, 5),
        (Integrator::Euler, 1),
    ] {
        let sc = presets::taylor_green(32, mu, 0.5, 0.01)
            .unwrap()
            .with_integrator(integrator);
        let traj = solver::run_with(&sc, stride, |_, _| {}).unwrap();
        for s in solver::synchronized_states(&traj) {
            assert_eq!(s.pressure_time, s.time);
            let exact = presets::taylor_green_pressure(sc.grid(), mu, s.time);
            let err = (&s.pressure - &exact).max_abs() / exact.max_abs();
            // Linear interpolation (extrapolation at the end) of e^{-4μt} over
            // samples `stride·dt` apart; Euler also carries its O(dt) velocity error.
            let span = stride as f64 * 0.01;
            let tol = if integrator == Integrator::Euler {
                2e-3
            } else {
                (4.0 * mu).powi(2) * span * 0.01
            };
            assert!(err < tol, "{integrator:?}/{stride} t = {}: {err:e}", s.time);
        }
    }
}

#[test]
fn rk2_is_second_order_in_time() {
    let e: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&dt| tg_error(64, 0.01, 1.0, dt))
        .collect();
    for w in e.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.8..=2.2).contains(&order), "errors {e:?}");
    }
}

#[test]
fn euler_is_first_order_in_time() {
    let err = |dt: f64| {
        let sc = presets::taylor_green(32, 0.05, 1.0, dt)
            .unwrap()
            .with_integrator(Integrator::Euler);
        let last = solver::run(&sc).unwrap().last().clone();
        (&last.velocity - &presets::taylor_green_velocity(sc.grid(), 0.05, 1.0)).max_abs()
    };
    let order = (err(0.02) / err(0.01)).log2();
    assert!((0.8..=1.2).contains(&order), "order {order}");
}

#[test]
fn uniform_forcing_accelerates_uniformly() {
    let g = GridSpec::periodic([8, 8, 8], [1.0; 3]).unwrap();
    let c = 0.3;
    let sc = Scenario::new("uniform", VectorField::zeros(g), 0.1, 1.0, 0.01)
        .unwrap()
        .with_forcing(Forcing::Uniform {
            value: [c, 0.0, 0.0],
        })
        .unwrap();
    let traj = solver::run(&sc).unwrap();
    for s in traj.states() {
        let exact = VectorField::constant(g, [c * s.time, 0.0, 0.0]);
        assert!((&s.velocity - &exact).max_abs() <= 1e-12);
    }
}

#[test]
fn pressure_from_velocity_examples() {
    let g = presets::taylor_green_grid(32).unwrap();
    let p = solver::pressure_from_velocity(&VectorField::constant(g, [1.0, -2.0, 0.5])).unwrap();
    assert!(p.max_abs() < 1e-14);

    let u = presets::taylor_green_velocity(&g, 0.01, 0.7);
    let p = solver::pressure_from_velocity(&u).unwrap();
    assert!((&p - &presets::taylor_green_pressure(&g, 0.01, 0.7)).max_abs() < 1e-8);

    let sg = presets::shear_grid(32).unwrap();
    let p = solver::pressure_from_velocity(&presets::shear_velocity(&sg)).unwrap();
    assert!(p.max_abs() < 1e-12);
}

#[test]
fn energy_residual_vanishes_at_rest() {
    let g = presets::taylor_green_grid(16).unwrap();
    let sc = Scenario::new("rest", VectorField::zeros(g), 0.1, 0.1, 0.05).unwrap();
    let traj = solver::run(&sc).unwrap();
    assert_eq!(
        solver::energy_equation_residual(&traj, 0)
            .unwrap()
            .max_abs(),
        0.0
    );
    assert!(matches!(
        solver::energy_equation_residual(&traj, 2),
        Err(Error::IndexOutOfRange { index: 3, len: 3 })
    ));
}

#[test]
fn energy_residual_is_consistent_under_refinement() {
    let norm = |n: usize, dt: f64| {
        let traj = solver::run(&presets::taylor_green(n, 0.1, 1.0, dt).unwrap()).unwrap();
        solver::energy_residual_norm(&traj).unwrap()
    };
    let (coarse, fine) = (norm(16, 0.04), norm(32, 0.02));
    assert!(coarse / fine >= 3.0, "coarse {coarse}, fine {fine}");
}

#[test]
fn energy_residual_detects_non_solutions() {
    let norm = |n: usize, dt: f64| {
        let sc = presets::taylor_green(n, 0.1, 1.0, dt).unwrap();
        let p = solver::pressure_from_velocity(sc.initial()).unwrap();
        let states = (0..=sc.steps())
            .map(|k| {
                solver::FlowState::new(k as f64 * dt, sc.initial().clone(), p.clone()).unwrap()
            })
            .collect();
        let traj = solver::Trajectory::from_states(sc, states).unwrap();
        solver::energy_residual_norm(&traj).unwrap()
    };
    let (coarse, fine) = (norm(16, 0.04), norm(32, 0.02));
    assert!(
        fine > 0.5 * coarse && fine > 0.1,
        "coarse {coarse}, fine {fine}"
    );
}

#[test]
fn forced_energy_budget_closes() {
    // Kolmogorov flow started from rest: the residual includes (f, U).
    let g = presets::taylor_green_grid(32).unwrap();
    let norm = |dt: f64| {
        let sc = Scenario::new("kolmogorov", VectorField::zeros(g), 0.1, 1.0, dt)
            .unwrap()
            .with_forcing(Forcing::Kolmogorov {
                amplitude: 1.0,
                mode: 1,
            })
            .unwrap();
        solver::energy_residual_norm(&solver::run(&sc).unwrap()).unwrap()
    };
    let (coarse, fine) = (norm(0.02), norm(0.01));
    assert!(coarse / fine >= 3.0, "coarse {coarse}, fine {fine}");
}

#[test]
fn cfl_violation_is_reported_with_context() {
    // Uniform forcing accelerates the flow past the advective limit.
    let g = GridSpec::periodic([8, 8, 1], [2.0 * PI, 2.0 * PI, 1.0]).unwrap();
    let sc = Scenario::new("runaway", VectorField::zeros(g), 0.01, 10.0, 0.1)
        .unwrap()
        .with_forcing(Forcing::Uniform {
            value: [5.0, 0.0, 0.0],
        })
        .unwrap();
    let err = solver::run(&sc).unwrap_err();
    match &err {
        Error::Scenario {
            scenario,
            time,
            source,
        } => {
            assert_eq!(scenario, "runaway");
            assert!(*time > 0.0);
            assert!(matches!(**source, Error::CflViolation { .. }));
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn box_vortex_decays_and_keeps_no_slip() {
    let g = presets::box_grid(17).unwrap();
    let u0 = presets::box_vortex_velocity(&g, 0.5);
    let sc = Scenario::new("box", u0, 0.05, 0.2, 2e-3).unwrap();
    let traj = solver::run(&sc).unwrap();
    let energy: Vec<f64> = traj
        .states()
        .iter()
        .map(|s| ops::integral(&ops::kinetic_energy_density(&s.velocity)))
        .collect();
    assert!(
        energy.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)),
        "{energy:?}"
    );
    for s in traj.states() {
        assert_eq!(solver::wall_sup(&s.velocity), 0.0);
        assert!(ops::mean(&s.pressure).abs() < 1e-12);
    }
}

#[test]
fn trajectories_round_trip_through_disk() {
    let sc = presets::taylor_green(16, 0.05, 0.2, 0.05).unwrap();
    let traj = solver::run(&sc).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let index = traj.save(dir.path()).unwrap();
    assert_eq!(index.states.len(), traj.len());
    assert_eq!(
        index.states[1].velocity_offset,
        index.states[0].pressure_offset + 64 + 8 * 256
    );
    let back = solver::load_states(dir.path()).unwrap();
    assert_eq!(back.as_slice(), traj.states());
}
