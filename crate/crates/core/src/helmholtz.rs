//! Orthogonal splitting of a vector field into a gradient and a solenoidal
//! part, `W = ∇R + V`, with `ΔR = div W` and `∂R/∂n = 0` on walls.

use crate::error::{Error, Result};
use crate::fields::{ops, Boundary, GridSpec, ScalarField, VectorField};
use crate::poisson;

/// Guard added to defect denominators so zero inputs report zero defect.
pub const DEFECT_GUARD: f64 = 1e-300;
/// Allowed normal flux on walls relative to `||W||_inf`.
pub const BOUNDARY_FLUX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Mean-zero potential `R`.
    pub potential: ScalarField,
    /// `∇R` as evaluated by the grid's gradient.
    pub gradient_part: VectorField,
    /// `W - ∇R`.
    pub solenoidal: VectorField,
    /// `|<∇R, V>| / (||W||^2 + guard)`.
    pub orthogonality_defect: f64,
    /// `||div V|| / (||W|| + guard)`.
    pub div_defect: f64,
}

impl Decomposition {
    /// `||W - (∇R + V)|| / ||W||` against the original input.
    pub fn reconstruction_error(&self, w: &VectorField) -> f64 {
        let sum = &self.gradient_part + &self.solenoidal;
        ops::norm_l2_vector(&(w - &sum)) / (ops::norm_l2_vector(w) + DEFECT_GUARD)
    }
}

/// Largest normal component of `w` over the walls of a box grid.
pub fn boundary_normal_flux(w: &VectorField) -> f64 {
    let grid = *w.grid();
    if grid.bc == Boundary::Periodic {
        return 0.0;
    }
    let dims = grid.dims();
    let mut worst = 0.0f64;
    for idx in 0..grid.len() {
        let ijk = grid.unravel(idx);
        for (axis, &n) in dims.iter().enumerate() {
            if ijk[axis] == 0 || ijk[axis] == n - 1 {
                worst = worst.max(w.component(axis).values()[idx].abs());
            }
        }
    }
    worst
}

/// Discretization allowance for the mean of a discrete divergence on a box,
/// where one-sided wall stencils break the exact summation-by-parts identity.
pub(crate) fn box_mean_allowance(grid: &GridSpec, scale: f64) -> f64 {
    if grid.bc == Boundary::Periodic {
        return 0.0;
    }
    let lmin = grid.min_active_length();
    let h = grid.max_spacing();
    10.0 * (h / lmin).powi(2) * scale
}

pub fn leray_decompose(w: &VectorField) -> Result<Decomposition> {
    leray_decompose_with(w, poisson::DEFAULT_COMPAT_TOL)
}

pub fn leray_decompose_with(w: &VectorField, compat_tol: f64) -> Result<Decomposition> {
    let grid = *w.grid();
    let w_inf = w.max_abs();
    let flux = boundary_normal_flux(w);
    let flux_threshold = BOUNDARY_FLUX_TOL * w_inf;
    if flux > flux_threshold {
        return Err(Error::BoundaryFluxViolation {
            flux,
            threshold: flux_threshold,
        });
    }
    let div = ops::divergence(w);
    let rhs = -&div;
    let defect = ops::mean(&rhs).abs();
    let lmin = grid.min_active_length();
    // Floor by the input's own scale so roundoff-level divergences of an
    // already solenoidal field are not compared against themselves.
    let threshold = compat_tol * (ops::norm_l2(&rhs) + ops::norm_l2_vector(w) / lmin)
        + box_mean_allowance(&grid, w_inf / lmin);
    if defect > threshold {
        return Err(Error::CompatibilityViolation { defect, threshold });
    }
    // The mean is within tolerance; the solver removes it.
    let solved = poisson::solve_poisson_neumann(&rhs, f64::INFINITY)?;
    let potential = solved.solution;
    let gradient_part = ops::gradient(&potential);
    let solenoidal = w - &gradient_part;

    let w_norm = ops::norm_l2_vector(w);
    let inner = ops::inner_l2_vector(&gradient_part, &solenoidal)?;
    let orthogonality_defect = inner.abs() / (w_norm * w_norm + DEFECT_GUARD);
    let div_defect = ops::norm_l2(&ops::divergence(&solenoidal)) / (w_norm + DEFECT_GUARD);
    Ok(Decomposition {
        potential,
        gradient_part,
        solenoidal,
        orthogonality_defect,
        div_defect,
    })
}

/// Solenoidal part of `w`.
pub fn project_solenoidal(w: &VectorField) -> Result<VectorField> {
    Ok(leray_decompose(w)?.solenoidal)
}
