use crate::error::{Error, Result};
use crate::fields::{axpy, ops, Boundary, ScalarField, VectorField};
use crate::helmholtz;
use crate::poisson;
use crate::solver::scenario::{advective_courant, Integrator, Scenario, CFL_LIMIT};
use crate::solver::{FlowState, Trajectory};

/// `μΔU - (U,∇)U + f`, the velocity tendency before projection.
fn tendency(u: &VectorField, scenario: &Scenario) -> VectorField {
    let mut out = axpy(
        &(&ops::vector_laplacian(u) * scenario.viscosity()),
        -1.0,
        &ops::dealias_vector(&ops::convection(u)),
    );
    if let Some(f) = scenario.forcing_field() {
        out = &out + f;
    }
    out
}

/// Projects a tentative velocity; returns the solenoidal part and the
/// potential `R` of the removed gradient.
fn project(ustar: VectorField) -> Result<(VectorField, ScalarField)> {
    let walled = ustar.grid().bc == Boundary::NoSlipBox;
    let ustar = if walled {
        ustar.with_zero_boundary()
    } else {
        ustar
    };
    let d = helmholtz::leray_decompose(&ustar)?;
    let u = if walled {
        d.solenoidal.with_zero_boundary()
    } else {
        d.solenoidal
    };
    Ok((u, d.potential))
}

/// Advances one step of size `dt`.
pub fn step(state: &FlowState, scenario: &Scenario) -> Result<FlowState> {
    let dt = scenario.dt();
    let t = state.time;
    let courant = advective_courant(&state.velocity, dt);
    if courant > CFL_LIMIT || !courant.is_finite() {
        return Err(Error::CflViolation { time: t, courant });
    }
    let u = &state.velocity;
    let (ustar, pressure_time) = match scenario.integrator() {
        Integrator::Euler => (axpy(u, dt, &tendency(u, scenario)), t),
        Integrator::Rk2 => {
            let (half, _) = project(axpy(u, 0.5 * dt, &tendency(u, scenario)))?;
            (axpy(u, dt, &tendency(&half, scenario)), t + 0.5 * dt)
        }
    };
    let (velocity, potential) = project(ustar)?;
    let pressure = potential.map(|r| r / dt);
    let time = t + dt;
    if !velocity.is_finite() || !pressure.is_finite() {
        return Err(Error::BlowUp { time });
    }
    Ok(FlowState {
        time,
        velocity,
        pressure,
        pressure_time,
    })
}

/// Initial state: `Φ` with the pressure it induces.
pub fn initial_state(scenario: &Scenario) -> Result<FlowState> {
    let u = scenario.initial().clone();
    let p = pressure_from_velocity(&u)?;
    FlowState::new(0.0, u, p)
}

pub fn run(scenario: &Scenario) -> Result<Trajectory> {
    run_with(scenario, 1, |_, _| {})
}

/// Integrates to the horizon, calling `hook(step, state)` on every state
/// (including the initial one) and storing every `stride`-th state plus the
/// final one.
pub fn run_with(
    scenario: &Scenario,
    stride: usize,
    mut hook: impl FnMut(usize, &FlowState),
) -> Result<Trajectory> {
    let stride = stride.max(1);
    let wrap = |time: f64, e: Error| Error::Scenario {
        scenario: scenario.name().to_string(),
        time,
        source: Box::new(e),
    };
    let mut state = initial_state(scenario).map_err(|e| wrap(0.0, e))?;
    hook(0, &state);
    let steps = scenario.steps();
    let mut kept = vec![state.clone()];
    for k in 1..=steps {
        state = step(&state, scenario).map_err(|e| wrap(state.time, e))?;
        // Keep the time grid exact rather than accumulating roundoff.
        state.time = k as f64 * scenario.dt();
        hook(k, &state);
        if k % stride == 0 || k == steps {
            kept.push(state.clone());
        }
    }
    Ok(Trajectory::from_parts(scenario.clone(), kept))
}

/// Mean-zero `P` with `-ΔP = Σ ∂U_α/∂x_β ∂U_β/∂x_α`.
pub fn pressure_from_velocity(u: &VectorField) -> Result<ScalarField> {
    let grid = *u.grid();
    let g = ops::velocity_gradient(u);
    let rhs = ops::gradient_contraction(&g);
    let gmax = g
        .iter()
        .flat_map(|r| r.iter())
        .map(|d| d.max_abs())
        .fold(0.0, f64::max);
    let defect = ops::mean(&rhs).abs();
    let threshold = poisson::DEFAULT_COMPAT_TOL * (ops::norm_l2(&rhs) + gmax * gmax)
        + helmholtz::box_mean_allowance(&grid, gmax * gmax);
    if grid.bc == Boundary::NoSlipBox && defect > threshold {
        return Err(Error::CompatibilityViolation { defect, threshold });
    }
    Ok(poisson::solve_poisson_neumann(&rhs, f64::INFINITY)?.solution)
}

/// Pressure at time `t` by linear interpolation between two samples.
fn pressure_at(a: &FlowState, b: &FlowState, t: f64) -> ScalarField {
    let span = b.pressure_time - a.pressure_time;
    if span.abs() < 1e-14 * b.time.abs().max(1.0) {
        return b.pressure.clone();
    }
    let w = (t - a.pressure_time) / span;
    &a.pressure + &(&(&b.pressure - &a.pressure) * w)
}

/// Stored states with each pressure moved to its state's own time by linear
/// interpolation between neighbouring pressure samples (extrapolation past
/// the ends). Stepping produces `P` at the step midpoint.
pub fn synchronized_states(traj: &Trajectory) -> Vec<FlowState> {
    let s = traj.states();
    let n = s.len();
    (0..n)
        .map(|k| {
            let mut out = s[k].clone();
            if n > 1 && out.pressure_time != out.time {
                let j = if s[k].pressure_time < s[k].time {
                    k.min(n - 2)
                } else {
                    k.max(1) - 1
                };
                out.pressure = pressure_at(&s[j], &s[j + 1], s[k].time);
                out.pressure_time = out.time;
            }
            out
        })
        .collect()
}

/// Relative error estimate of each pressure from [`synchronized_states`]:
/// the second difference of the neighbouring stored pressures (first
/// difference when only two exist) over the pressure's norm; zero where no
/// interpolation was needed.
pub fn synchronization_error(traj: &Trajectory) -> Vec<f64> {
    let s = traj.states();
    let n = s.len();
    let rel = |d: ScalarField, k: usize| {
        let scale = ops::norm_l2(&s[k].pressure);
        let d = ops::norm_l2(&d);
        if scale > 0.0 {
            d / scale
        } else {
            d
        }
    };
    (0..n)
        .map(|k| {
            if s[k].pressure_time == s[k].time {
                0.0
            } else if n < 3 {
                rel(&s[1].pressure - &s[0].pressure, k)
            } else {
                let j = k.clamp(1, n - 2);
                let d2 = &(&s[j + 1].pressure - &(&s[j].pressure * 2.0)) + &s[j - 1].pressure;
                rel(d2, k)
            }
        })
        .collect()
}

/// Pointwise residual of the kinetic-energy-density equation
/// `∂E/∂t - μΔE + μΣ|∇U_α|² + (∇E,U) + (∇P,U) - (f,U)` centred at the
/// midpoint of states `k` and `k + 1`.
pub fn energy_equation_residual(traj: &Trajectory, k: usize) -> Result<ScalarField> {
    let a = traj.get(k)?;
    let b = traj.get(k + 1)?;
    let sc = traj.scenario();
    let mu = sc.viscosity();
    let dt = b.time - a.time;
    let tm = 0.5 * (a.time + b.time);

    let ea = ops::kinetic_energy_density(&a.velocity);
    let eb = ops::kinetic_energy_density(&b.velocity);
    let um = &(&a.velocity + &b.velocity) * 0.5;
    let em = &(&ea + &eb) * 0.5;

    let transport = |u: &VectorField, e: &ScalarField| -> Result<ScalarField> {
        let g = ops::velocity_gradient(u);
        let diss = ops::gradient_energy_density(&g);
        let adv = ops::dot(&ops::gradient(e), u)?;
        Ok(&(&diss * mu) + &adv)
    };
    let local = &(&transport(&a.velocity, &ea)? + &transport(&b.velocity, &eb)?) * 0.5;
    let dedt = &(&eb - &ea) * (1.0 / dt);
    let pm = pressure_at(a, b, tm);
    let press = ops::dot(&ops::gradient(&pm), &um)?;

    let mut r = &(&(&dedt - &(&ops::laplacian(&em) * mu)) + &local) + &press;
    if let Some(f) = sc.forcing_field() {
        r = &r - &ops::dot(f, &um)?;
    }
    Ok(r)
}

/// `||residual||_{L₂(Q)}` accumulated over every stored interval.
pub fn energy_residual_norm(traj: &Trajectory) -> Result<f64> {
    let mut acc = 0.0;
    for k in 0..traj.len().saturating_sub(1) {
        let dt = traj.states()[k + 1].time - traj.states()[k].time;
        acc += dt * ops::norm_l2(&energy_equation_residual(traj, k)?).powi(2);
    }
    Ok(acc.sqrt())
}
