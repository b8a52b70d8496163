//! Measurements at the local maxima of the kinetic-energy density: whether
//! velocity and pressure are stationary there, the angle between `U` and its
//! directional derivatives, and the signs of the principal minors of
//! `M_βγ = Σ_α U_α ∂²U_α/∂x_β∂x_γ`.

use serde::{Deserialize, Serialize};

use crate::diagnostics::maxima::MaximumSite;
use crate::diagnostics::{ClaimRecord, Report};
use crate::fields::{ops, ScalarField, VectorField};
use crate::solver::FlowState;

pub const VELOCITY_STATIONARY: [&str; 3] = [
    "velocity_stationary_u1",
    "velocity_stationary_u2",
    "velocity_stationary_u3",
];
pub const PRESSURE_STATIONARY: &str = "pressure_stationary";
pub const DIRECTION_COSINE: [&str; 3] = [
    "direction_cosine_nonzero_x",
    "direction_cosine_nonzero_y",
    "direction_cosine_nonzero_z",
];
pub const MINOR_SIGN: [&str; 3] = ["minor_1_negative", "minor_2_positive", "minor_3_negative"];

/// Multiplier `c` in the `c·h·scale` tolerances.
pub const TOL_FACTOR: f64 = 10.0;
/// Floor below which a tolerance is not scaled down further.
pub const TOL_FLOOR: f64 = 1e-9;
/// `|U||∂U/∂x_β|` below this fraction of `||E||_∞` leaves the cosine undefined.
pub const COSINE_UNDEFINED: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumSite {
    pub time: f64,
    pub site: MaximumSite,
    /// `|∇U_α|` at the site.
    pub grad_u: [f64; 3],
    pub grad_p: f64,
    pub grad_e: f64,
    /// `∂E/∂x_β / (|U| |∂U/∂x_β|)`; `None` where that is 0/0 or the direction is degenerate.
    pub cos_gamma: [Option<f64>; 3],
    /// Leading principal minors over the active directions.
    pub minors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CoincidenceReport {
    pub report: Report,
    pub sites: Vec<ExtremumSite>,
}

/// Tolerances used for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceTolerances {
    pub velocity_gradient: f64,
    pub pressure_gradient: f64,
    pub cosine: f64,
}

impl CoincidenceTolerances {
    fn for_state(u: &VectorField, grad_u_max: f64, hess_p_max: f64) -> Self {
        let grid = u.grid();
        let h = grid.max_spacing();
        CoincidenceTolerances {
            velocity_gradient: (TOL_FACTOR * h * grad_u_max).max(TOL_FLOOR),
            pressure_gradient: (TOL_FACTOR * h * hess_p_max).max(TOL_FLOOR),
            cosine: (TOL_FACTOR * h / grid.min_active_length()).min(0.5),
        }
    }
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!("at most three directions"),
    }
}

fn hessian(s: &ScalarField, active: &[usize]) -> Vec<Vec<ScalarField>> {
    active
        .iter()
        .map(|&a| {
            active
                .iter()
                .map(|&b| ops::second_partial(s, a, b))
                .collect()
        })
        .collect()
}

/// Measures every site and appends one claim record per sub-claim.
pub fn extremum_coincidence(state: &FlowState, sites: &[MaximumSite]) -> CoincidenceReport {
    let mut out = CoincidenceReport {
        report: Report::new("coincidence"),
        sites: Vec::new(),
    };
    if sites.is_empty() {
        return out;
    }
    let u = &state.velocity;
    let grid = *u.grid();
    let active = grid.active_axes();
    let t = state.time;

    let g = ops::velocity_gradient(u);
    let grad_norm = |alpha: usize, i: usize| -> f64 {
        (0..3)
            .map(|b| g[alpha][b].values()[i].powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let grad_u_max = (0..grid.len())
        .flat_map(|i| (0..3).map(move |a| (a, i)))
        .map(|(a, i)| grad_norm(a, i))
        .fold(0.0, f64::max);
    let grad_p = ops::gradient(&state.pressure);
    let hess_p = hessian(&state.pressure, &active);
    let hess_p_max = hess_p
        .iter()
        .flatten()
        .map(|f| f.max_abs())
        .fold(0.0, f64::max);
    let e = ops::kinetic_energy_density(u);
    let grad_e = ops::gradient(&e);
    let hess_u: Vec<Vec<Vec<ScalarField>>> =
        (0..3).map(|a| hessian(u.component(a), &active)).collect();
    let e_inf = e.max_abs();
    let second_max = hess_u
        .iter()
        .flatten()
        .flatten()
        .map(|f| f.max_abs())
        .fold(0.0, f64::max);
    let minor_scale = u.max_abs() * second_max;
    let tol = CoincidenceTolerances::for_state(u, grad_u_max, hess_p_max);

    let rep = &mut out.report;
    for site in sites {
        let i = site.index;
        let at = site.coords;
        let grad_u: [f64; 3] = std::array::from_fn(|a| grad_norm(a, i));
        for (a, &gn) in grad_u.iter().enumerate() {
            rep.push(
                ClaimRecord::new(VELOCITY_STATIONARY[a], t, gn, 0.0, tol.velocity_gradient).at(at),
            );
        }
        let gp = grad_p
            .at(site.ijk)
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        rep.push(ClaimRecord::new(PRESSURE_STATIONARY, t, gp, 0.0, tol.pressure_gradient).at(at));
        let ge = grad_e
            .at(site.ijk)
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();

        let speed = u.at(site.ijk).iter().map(|v| v * v).sum::<f64>().sqrt();
        let cos_gamma: [Option<f64>; 3] = std::array::from_fn(|b| {
            if !grid.is_active(b) {
                return None;
            }
            let du = (0..3)
                .map(|a| g[a][b].values()[i].powi(2))
                .sum::<f64>()
                .sqrt();
            let denom = speed * du;
            (denom >= COSINE_UNDEFINED * e_inf && denom > 0.0)
                .then(|| grad_e.component(b).values()[i] / denom)
        });
        for b in 0..3 {
            if !grid.is_active(b) {
                continue;
            }
            rep.observe(
                format!("direction_cosine_{}", ["x", "y", "z"][b]),
                t,
                cos_gamma[b],
                Some(at),
            );
            // The claim is `cos γ ≠ 0`; recorded as `threshold <= |cos γ|`.
            if let Some(c) = cos_gamma[b] {
                rep.push(ClaimRecord::new(DIRECTION_COSINE[b], t, tol.cosine, c.abs(), 0.0).at(at));
            }
        }

        let m: Vec<Vec<f64>> = (0..active.len())
            .map(|p| {
                (0..active.len())
                    .map(|q| {
                        (0..3)
                            .map(|a| u.component(a).values()[i] * hess_u[a][p][q].values()[i])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let minors: Vec<f64> = (1..=active.len())
            .map(|k| {
                det(&m[..k]
                    .iter()
                    .map(|row| row[..k].to_vec())
                    .collect::<Vec<_>>())
            })
            .collect();
        for (k, &mk) in minors.iter().enumerate() {
            let mtol = TOL_FLOOR * minor_scale.powi(k as i32 + 1);
            // Required signs alternate: negative, positive, negative.
            let lhs = if k % 2 == 0 { mk } else { -mk };
            rep.push(ClaimRecord::new(MINOR_SIGN[k], t, lhs, 0.0, mtol).at(at));
        }

        out.sites.push(ExtremumSite {
            time: t,
            site: *site,
            grad_u,
            grad_p: gp,
            grad_e: ge,
            cos_gamma,
            minors,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::maxima::interior_maxima;
    use crate::solver::{presets, pressure_from_velocity};

    fn analyze(u: VectorField) -> CoincidenceReport {
        let p = pressure_from_velocity(&u).unwrap();
        let state = FlowState::new(0.0, u, p).unwrap();
        let sites = interior_maxima(&ops::kinetic_energy_density(&state.velocity));
        extremum_coincidence(&state, &sites)
    }

    #[test]
    fn separable_field_passes() {
        let g = presets::taylor_green_grid(32).unwrap();
        let rep = analyze(presets::separable_velocity(&g));
        assert_eq!(rep.sites.len(), 4);
        for id in VELOCITY_STATIONARY.iter().chain([&PRESSURE_STATIONARY]) {
            assert!(rep.report.claim(id).all(|r| r.passed()), "{id}");
        }
        for s in &rep.sites {
            assert!(s.grad_u.iter().all(|&g| g < 1e-12));
            assert!(s.minors[0] < 0.0 && s.minors[1] > 0.0);
        }
    }

    #[test]
    fn shear_field_is_flagged() {
        let g = presets::shear_grid(256).unwrap();
        let rep = analyze(presets::shear_velocity(&g));
        assert_eq!(rep.sites.len(), 2);
        let at_zero = rep.sites.iter().find(|s| s.site.coords[2] == 0.0).unwrap();
        assert!((at_zero.grad_u[0] - 1.0).abs() < 0.05);
        assert!(at_zero.cos_gamma[2].unwrap().abs() < 1e-12);
        assert!(at_zero.cos_gamma[0].is_none());
        assert!(rep
            .report
            .claim(VELOCITY_STATIONARY[0])
            .all(|r| !r.passed()));
        assert!(rep.report.claim(VELOCITY_STATIONARY[1]).all(|r| r.passed()));
        assert!(rep.report.claim(DIRECTION_COSINE[2]).all(|r| !r.passed()));
    }

    #[test]
    fn empty_site_list_gives_empty_report() {
        let g = presets::taylor_green_grid(8).unwrap();
        let rep = analyze(VectorField::zeros(g));
        assert!(rep.sites.is_empty() && rep.report.records.is_empty());
    }
}
