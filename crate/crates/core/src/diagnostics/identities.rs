//! Pointwise vector-calculus identities linking convection, the Lamb vector
//! `[U, ω]`, its potential `R`, and the pressure, plus the `L₂` bound of
//! `ΔP` by fourth powers of the velocity gradient.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{ClaimRecord, Report};
use crate::error::Result;
use crate::fields::{ops, ScalarField, Scheme, VectorField};
use crate::helmholtz;
use crate::solver::FlowState;

pub const CONVECTION_LAMB: &str = "convection_lamb_identity";
pub const CONVECTION_DIVERGENCE: &str = "convection_divergence_identity";
pub const ENERGY_POTENTIAL: &str = "energy_potential_identity";
pub const PRESSURE_POISSON: &str = "pressure_poisson_identity";
pub const PRESSURE_LAPLACIAN_BOUND: &str = "pressure_laplacian_bound";

/// Residual tolerance used when the identity report is turned into claims.
pub const IDENTITY_TOL: f64 = 1e-8;
/// Multiplier of the measured discretization level in [`discretization_tolerance`].
pub const TOL_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    /// `||(U,∇)U - (∇E - [U,ω])|| / scale`.
    pub convection_lamb: f64,
    /// `||div((U,∇)U) - Σ ∂U_α/∂x_β ∂U_β/∂x_α|| / scale`.
    pub convection_divergence: f64,
    /// `||Σ ∂U_α/∂x_β ∂U_β/∂x_α - (ΔE - ΔR)|| / scale`, `R` from the Lamb vector.
    pub energy_potential: f64,
    /// `||-ΔP - Σ ∂U_α/∂x_β ∂U_β/∂x_α|| / scale`.
    pub pressure_poisson: f64,
    /// `∫(ΔP)²`.
    pub laplacian_p_sq: f64,
    /// `9 Σ ∫|∂U_α/∂x_β|⁴`.
    pub gradient_quartic: f64,
}

impl IdentityResiduals {
    /// `9 Σ∫|∂U_α/∂x_β|⁴ - ∫(ΔP)²`.
    pub fn laplacian_margin(&self) -> f64 {
        self.gradient_quartic - self.laplacian_p_sq
    }
}

/// `||a - b|| / max(||a||, ||b||, floor)`, zero when all vanish.
fn rel(a: &ScalarField, b: &ScalarField, floor: f64) -> f64 {
    let scale = ops::norm_l2(a).max(ops::norm_l2(b)).max(floor);
    let d = ops::norm_l2(&(a - b));
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

fn rel_vec(a: &VectorField, b: &VectorField, floor: f64) -> f64 {
    let scale = ops::norm_l2_vector(a)
        .max(ops::norm_l2_vector(b))
        .max(floor);
    let d = ops::norm_l2_vector(&(a - b));
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// Pointwise Euclidean length of a vector field.
fn magnitude(v: &VectorField) -> ScalarField {
    let c = v.components();
    let grid = *v.grid();
    ScalarField::from_raw(
        grid,
        (0..grid.len())
            .map(|i| c.iter().map(|s| s.values()[i].powi(2)).sum::<f64>().sqrt())
            .collect(),
    )
}

fn product(a: &ScalarField, b: &ScalarField) -> ScalarField {
    a.zip_with(b, |x, y| x * y).expect("same grid")
}

pub fn pressure_identity_residual(state: &FlowState) -> Result<IdentityResiduals> {
    let u = &state.velocity;
    let g = ops::velocity_gradient(u);
    let conv = ops::convection_from_gradient(u, &g);
    let e = ops::kinetic_energy_density(u);
    let lamb = ops::cross(u, &ops::curl(u))?;
    let contraction = ops::gradient_contraction(&g);

    // Sides of an identity may both vanish up to roundoff (e.g. for shear
    // flows); compare them against the size of the terms they are built from.
    let speed = magnitude(u);
    let grad_sq = ops::gradient_energy_density(&g);
    let first_order = ops::norm_l2(&product(&speed, &grad_sq.map(f64::sqrt)));
    let second_order = ops::norm_l2(&grad_sq)
        + ops::norm_l2(&product(&speed, &magnitude(&ops::vector_laplacian(u))));

    let convection_lamb = rel_vec(&conv, &(&ops::gradient(&e) - &lamb), first_order);
    let convection_divergence = rel(&ops::divergence(&conv), &contraction, second_order);
    // A mean defect of `div [U,ω]` shows up in the residual instead of aborting.
    let r = helmholtz::leray_decompose_with(&lamb, f64::INFINITY)?.potential;
    let energy_potential = rel(
        &contraction,
        &(&ops::laplacian(&e) - &ops::laplacian(&r)),
        second_order,
    );
    let lap_p = ops::laplacian(&state.pressure);
    let pressure_poisson = rel(&(-&lap_p), &contraction, second_order);

    let laplacian_p_sq = ops::norm_l2(&lap_p).powi(2);
    let quartic: f64 = g
        .iter()
        .flatten()
        .map(|d| ops::integral(&d.map(|v| v.powi(4))))
        .sum();
    Ok(IdentityResiduals {
        convection_lamb,
        convection_divergence,
        energy_potential,
        pressure_poisson,
        laplacian_p_sq,
        gradient_quartic: 9.0 * quartic,
    })
}

/// Residual level attributable to the discretization of `u`, times
/// [`TOL_FACTOR`], floored at [`IDENTITY_TOL`]. Spectral grids: the share of
/// `||U||` in modes above a quarter of the grid, whose products alias.
/// Finite differences: `(π h / L)²`, the stencils' relative truncation error.
pub fn discretization_tolerance(u: &VectorField) -> f64 {
    let grid = u.grid();
    let level = match grid.scheme {
        Scheme::Spectral => {
            let norm = ops::norm_l2_vector(u);
            if norm > 0.0 {
                ops::norm_l2_vector(&(u - &u.map_components(|c| ops::lowpass(c, 4)))) / norm
            } else {
                0.0
            }
        }
        Scheme::FiniteDifference => (PI * grid.max_spacing() / grid.min_active_length()).powi(2),
    };
    (TOL_FACTOR * level).max(IDENTITY_TOL)
}

/// Claim records for one state: each residual against `tol`, and the
/// `ΔP` bound with a relative tolerance of `tol`.
pub fn identity_report(state: &FlowState, tol: f64) -> Result<Report> {
    identity_report_with(state, tol, tol)
}

/// As [`identity_report`], with a separate tolerance for the claims that
/// involve the pressure.
pub fn identity_report_with(state: &FlowState, tol: f64, pressure_tol: f64) -> Result<Report> {
    let r = pressure_identity_residual(state)?;
    let t = state.time;
    let mut rep = Report::new("pressure_identity");
    for (id, v, tol) in [
        (CONVECTION_LAMB, r.convection_lamb, tol),
        (CONVECTION_DIVERGENCE, r.convection_divergence, tol),
        (ENERGY_POTENTIAL, r.energy_potential, tol),
        (PRESSURE_POISSON, r.pressure_poisson, pressure_tol),
    ] {
        rep.push(ClaimRecord::new(id, t, v, 0.0, tol));
    }
    rep.push(ClaimRecord::new(
        PRESSURE_LAPLACIAN_BOUND,
        t,
        r.laplacian_p_sq,
        r.gradient_quartic,
        pressure_tol * r.gradient_quartic,
    ));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::random;
    use crate::solver::{presets, pressure_from_velocity};

    #[test]
    fn constant_flow_has_zero_residuals() {
        let g = presets::taylor_green_grid(16).unwrap();
        let u = VectorField::constant(g, [1.0, 2.0, 0.0]);
        let s = FlowState::new(0.0, u, ScalarField::zeros(g)).unwrap();
        let r = pressure_identity_residual(&s).unwrap();
        assert_eq!(
            [
                r.convection_lamb,
                r.convection_divergence,
                r.energy_potential,
                r.pressure_poisson
            ],
            [0.0; 4]
        );
        assert_eq!(r.laplacian_margin(), 0.0);
    }

    #[test]
    fn taylor_green_satisfies_every_identity() {
        let g = presets::taylor_green_grid(32).unwrap();
        let s = FlowState::new(
            0.3,
            presets::taylor_green_velocity(&g, 0.01, 0.3),
            presets::taylor_green_pressure(&g, 0.01, 0.3),
        )
        .unwrap();
        let rep = identity_report(&s, IDENTITY_TOL).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn laplacian_bound_holds_on_random_fields() {
        let g = crate::fields::GridSpec::periodic([16, 16, 16], [1.0; 3]).unwrap();
        for seed in 0..3 {
            let u = random::smooth_solenoidal(&g, seed, 3, 1.0);
            let s = FlowState::new(0.0, u.clone(), pressure_from_velocity(&u).unwrap()).unwrap();
            let r = pressure_identity_residual(&s).unwrap();
            assert!(r.laplacian_margin() >= 0.0);
            assert!(r.pressure_poisson < 1e-10);
        }
    }

    #[test]
    fn vanishing_sides_do_not_inflate_residuals() {
        // (sin y, 0, 0): convection and the Lamb-vector combination both vanish.
        let g = presets::taylor_green_grid(32).unwrap();
        let u = VectorField::from_fn(g, |[_, y, _]| [y.sin(), 0.0, 0.0]);
        let s = FlowState::new(0.0, u.clone(), pressure_from_velocity(&u).unwrap()).unwrap();
        let r = pressure_identity_residual(&s).unwrap();
        assert!(
            r.convection_lamb < 1e-12 && r.energy_potential < 1e-12,
            "{r:?}"
        );
    }

    #[test]
    fn tolerance_tracks_resolution() {
        let g = presets::taylor_green_grid(32).unwrap();
        assert_eq!(
            discretization_tolerance(&presets::taylor_green_velocity(&g, 0.1, 0.0)),
            IDENTITY_TOL
        );
        let fine = random::smooth_solenoidal(&g, 4, 3, 1.0);
        assert_eq!(discretization_tolerance(&fine), IDENTITY_TOL);
        let rough = random::smooth_solenoidal(&g, 4, 12, 1.0);
        assert!(discretization_tolerance(&rough) > 1e-3);
        let b = presets::box_grid(16).unwrap();
        let fd = discretization_tolerance(&presets::box_vortex_velocity(&b, 1.0));
        assert!((fd - 10.0 * (PI / 15.0).powi(2)).abs() < 1e-12);
    }
}
