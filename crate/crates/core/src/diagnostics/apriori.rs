//! A priori norm estimates of a trajectory against the data constants.

use rayon::prelude::*;

use crate::diagnostics::{AprioriConstants, ClaimRecord, Report};
use crate::fields::{axpy, ops, ScalarField, VectorField};
use crate::solver::{synchronized_states, Trajectory};

pub const ENERGY_NORM: &str = "energy_norm_bound";
pub const DISSIPATION: &str = "dissipation_bound";
pub const PRESSURE_GRADIENT_L2: &str = "pressure_gradient_l2_bound";
pub const CONVECTION_L2: &str = "convection_l2_bound";
pub const PRESSURE_BY_CONVECTION: &str = "pressure_gradient_by_convection";
pub const TIME_DERIVATIVE: &str = "time_derivative_bound";
pub const LAPLACIAN: &str = "velocity_laplacian_bound";
pub const GRADIENT_SUP: &str = "velocity_gradient_sup_bound";
pub const PRESSURE_GRADIENT_SUP: &str = "pressure_gradient_sup_bound";
pub const VELOCITY_W22_RATIO: &str = "velocity_w22_ratio";
pub const PRESSURE_W22_RATIO: &str = "pressure_w22_ratio";

/// Default relative tolerance of the a priori claims.
pub const APRIORI_TOL: f64 = 1e-9;
/// Relative slack of `||∇P|| <= ||(U,∇)U||`, an equality for some flows,
/// evaluated with pressure interpolated to the state times.
pub const PRESSURE_SYNC_TOL: f64 = 1e-6;

pub type AprioriReport = Report;

/// Spatial norms of one state.
#[derive(Debug, Clone, Copy)]
struct StateNorms {
    u_sq: f64,
    grad_sq: f64,
    grad_component_max: f64,
    grad_p_sq: f64,
    convection_sq: f64,
    laplacian_u_sq: f64,
    u_w22_sq: f64,
    laplacian_p_sq: f64,
    p_w22_sq: f64,
}

fn w22_sq(s: &ScalarField) -> f64 {
    let grid = s.grid();
    let mut acc = ops::norm_l2(s).powi(2);
    for a in grid.active_axes() {
        acc += ops::norm_l2(&ops::partial(s, a)).powi(2);
        for b in grid.active_axes() {
            acc += ops::norm_l2(&ops::second_partial(s, a, b)).powi(2);
        }
    }
    acc
}

fn state_norms(u: &VectorField, p: &ScalarField) -> StateNorms {
    let g = ops::velocity_gradient(u);
    let per_component: Vec<f64> = g
        .iter()
        .map(|row| row.iter().map(|d| ops::norm_l2(d).powi(2)).sum())
        .collect();
    StateNorms {
        u_sq: ops::norm_l2_vector(u).powi(2),
        grad_sq: per_component.iter().sum(),
        grad_component_max: per_component.iter().copied().fold(0.0, f64::max),
        grad_p_sq: ops::norm_l2_vector(&ops::gradient(p)).powi(2),
        convection_sq: ops::norm_l2_vector(&ops::convection_from_gradient(u, &g)).powi(2),
        laplacian_u_sq: ops::norm_l2_vector(&ops::vector_laplacian(u)).powi(2),
        u_w22_sq: u.components().iter().map(w22_sq).sum(),
        laplacian_p_sq: ops::norm_l2(&ops::laplacian(p)).powi(2),
        p_w22_sq: w22_sq(p),
    }
}

/// Trapezoid rule on possibly non-uniform nodes.
pub fn time_integral(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// `dU/dt` at every stored state: three-point differences (centred inside,
/// one-sided at the ends), two-point when only two states exist.
pub fn velocity_time_derivative(traj: &Trajectory) -> Vec<VectorField> {
    let s = traj.states();
    let n = s.len();
    let grid = *traj.scenario().grid();
    match n {
        1 => vec![VectorField::zeros(grid)],
        2 => {
            let d = axpy(&s[1].velocity, -1.0, &s[0].velocity);
            let d = &d * (1.0 / (s[1].time - s[0].time));
            vec![d.clone(), d]
        }
        _ => (0..n)
            .map(|k| {
                let j = k.clamp(1, n - 2) - 1;
                let (t0, t1, t2) = (s[j].time, s[j + 1].time, s[j + 2].time);
                let (h1, h2) = (t1 - t0, t2 - t1);
                let w = match k - j {
                    0 => [
                        -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
                        (h1 + h2) / (h1 * h2),
                        -h1 / (h2 * (h1 + h2)),
                    ],
                    1 => [
                        -h2 / (h1 * (h1 + h2)),
                        (h2 - h1) / (h1 * h2),
                        h1 / (h2 * (h1 + h2)),
                    ],
                    _ => [
                        h2 / (h1 * (h1 + h2)),
                        -(h1 + h2) / (h1 * h2),
                        (h1 + 2.0 * h2) / (h2 * (h1 + h2)),
                    ],
                };
                let d = &s[j].velocity * w[0];
                let d = axpy(&d, w[1], &s[j + 1].velocity);
                axpy(&d, w[2], &s[j + 2].velocity)
            })
            .collect(),
    }
}

pub fn apriori_report(traj: &Trajectory, consts: &AprioriConstants, tol: f64) -> AprioriReport {
    let states = synchronized_states(traj);
    let norms: Vec<StateNorms> = states
        .par_iter()
        .map(|s| state_norms(&s.velocity, &s.pressure))
        .collect();
    let times = traj.times();
    let mut rep = Report::new("apriori");
    let rec = |id: &str, t: f64, lhs: f64, rhs: f64| ClaimRecord::new(id, t, lhs, rhs, tol * rhs);

    let (mut u_sup, mut grad_sup, mut p_sup, mut dissipation) = (0.0f64, 0.0f64, 0.0f64, 0.0);
    for (k, n) in norms.iter().enumerate() {
        let t = times[k];
        if k > 0 {
            dissipation += 0.5 * (t - times[k - 1]) * (n.grad_sq + norms[k - 1].grad_sq);
        }
        u_sup = u_sup.max(n.u_sq);
        grad_sup = grad_sup.max(n.grad_component_max);
        p_sup = p_sup.max(n.grad_p_sq);
        rep.push(rec(ENERGY_NORM, t, u_sup, consts.a));
        rep.push(rec(DISSIPATION, t, dissipation, consts.a2));
        rep.push(rec(GRADIENT_SUP, t, grad_sup, consts.a7));
        rep.push(rec(PRESSURE_GRADIENT_SUP, t, p_sup, consts.a10));
    }

    let t_end = *times.last().expect("non-empty");
    let integral =
        |f: fn(&StateNorms) -> f64| time_integral(&times, &norms.iter().map(f).collect::<Vec<_>>());
    let grad_p = integral(|n| n.grad_p_sq);
    let conv = integral(|n| n.convection_sq);
    rep.push(rec(PRESSURE_GRADIENT_L2, t_end, grad_p, consts.a3));
    rep.push(rec(CONVECTION_L2, t_end, conv, consts.a3));
    rep.push(ClaimRecord::new(
        PRESSURE_BY_CONVECTION,
        t_end,
        grad_p,
        conv,
        tol.max(PRESSURE_SYNC_TOL) * conv,
    ));

    let ut: Vec<f64> = velocity_time_derivative(traj)
        .par_iter()
        .map(|d| ops::norm_l2_vector(d).powi(2))
        .collect();
    rep.push(rec(
        TIME_DERIVATIVE,
        t_end,
        time_integral(&times, &ut),
        consts.a5,
    ));
    let lap_u = integral(|n| n.laplacian_u_sq);
    rep.push(rec(LAPLACIAN, t_end, lap_u, consts.a6));

    let ratio = |num: f64, den: f64| (den > 0.0).then(|| (num / den).sqrt());
    rep.observe(
        VELOCITY_W22_RATIO,
        t_end,
        ratio(integral(|n| n.u_w22_sq), lap_u),
        None,
    );
    rep.observe(
        PRESSURE_W22_RATIO,
        t_end,
        ratio(integral(|n| n.p_w22_sq), integral(|n| n.laplacian_p_sq)),
        None,
    );
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{self, presets, Scenario};

    #[test]
    fn rest_state_margins_vanish() {
        let g = presets::taylor_green_grid(8).unwrap();
        let sc = Scenario::new("rest", VectorField::zeros(g), 0.1, 0.3, 0.1).unwrap();
        let traj = solver::run(&sc).unwrap();
        let rep = apriori_report(&traj, &AprioriConstants::from_scenario(&sc), APRIORI_TOL);
        assert!(rep.all_pass());
        assert!(rep
            .records
            .iter()
            .all(|r| r.lhs == 0.0 && r.rhs == 0.0 && r.margin == 0.0));
        assert!(rep.observations.iter().all(|o| o.value.is_none()));
    }

    #[test]
    fn taylor_green_satisfies_the_rigorous_bounds() {
        let sc = presets::taylor_green(32, 0.05, 1.0, 0.01).unwrap();
        let traj = solver::run(&sc).unwrap();
        let c = AprioriConstants::from_scenario(&sc);
        let rep = apriori_report(&traj, &c, APRIORI_TOL);
        assert!(rep
            .claim(ENERGY_NORM)
            .chain(rep.claim(DISSIPATION))
            .all(|r| r.passed()));
        // Σ||∇U_k||² = 4π² e^{-4μt} for this flow.
        let last = rep.claim(DISSIPATION).last().unwrap();
        let exact = std::f64::consts::PI.powi(2) * (1.0 - (-4.0 * 0.05f64).exp()) / 0.05;
        assert!(
            (last.lhs - exact).abs() < 1e-3 * exact,
            "{} vs {exact}",
            last.lhs
        );
    }

    #[test]
    fn time_derivative_is_second_order() {
        let mu = 0.1;
        let sc = presets::taylor_green(16, mu, 0.4, 0.02).unwrap();
        let traj = solver::run(&sc).unwrap();
        let ut = velocity_time_derivative(&traj);
        for (s, d) in traj.states().iter().zip(&ut) {
            let exact = &presets::taylor_green_velocity(sc.grid(), mu, s.time) * (-2.0 * mu);
            assert!((d - &exact).max_abs() < 1e-5, "t = {}", s.time);
        }
    }

    #[test]
    fn trapezoid_handles_uneven_nodes() {
        assert_eq!(time_integral(&[0.0, 1.0, 3.0], &[0.0, 1.0, 3.0]), 4.5);
        assert_eq!(time_integral(&[2.0], &[5.0]), 0.0);
    }
}
