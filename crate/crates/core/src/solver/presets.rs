//! Analytic flows used as oracles, controls and demonstration scenarios.

use std::f64::consts::PI;

use crate::error::Result;
use crate::fields::{Boundary, GridSpec, ScalarField, Scheme, VectorField};
use crate::solver::Scenario;

/// `[0,2π]² × [0,1]` with a single node across the last direction, so that
/// volume integrals equal their planar counterparts.
pub fn taylor_green_grid(n: usize) -> Result<GridSpec> {
    GridSpec::periodic([n, n, 1], [2.0 * PI, 2.0 * PI, 1.0])
}

/// `e^{-2μt} (sin x cos y, -cos x sin y, 0)`.
pub fn taylor_green_velocity(grid: &GridSpec, mu: f64, t: f64) -> VectorField {
    let d = (-2.0 * mu * t).exp();
    VectorField::from_fn(*grid, |[x, y, _]| {
        [d * x.sin() * y.cos(), -d * x.cos() * y.sin(), 0.0]
    })
}

/// `(cos 2x + cos 2y) e^{-4μt} / 4`, the pressure balancing
/// `(U,∇)U = (sin 2x, sin 2y, 0) e^{-4μt} / 2` for this orientation.
pub fn taylor_green_pressure(grid: &GridSpec, mu: f64, t: f64) -> ScalarField {
    let d = (-4.0 * mu * t).exp();
    ScalarField::from_fn(*grid, |[x, y, _]| {
        0.25 * ((2.0 * x).cos() + (2.0 * y).cos()) * d
    })
}

/// `∫E dx = π² e^{-4μt}` on [`taylor_green_grid`].
pub fn taylor_green_energy(mu: f64, t: f64) -> f64 {
    PI * PI * (-4.0 * mu * t).exp()
}

pub fn taylor_green(n: usize, mu: f64, horizon: f64, dt: f64) -> Result<Scenario> {
    let grid = taylor_green_grid(n)?;
    Scenario::new(
        "taylor-green-2d",
        taylor_green_velocity(&grid, mu, 0.0),
        mu,
        horizon,
        dt,
    )
}

/// `(sin z, 2 cos z, 0)`: smooth, solenoidal, and its energy maximum on
/// `z = 0` sits where `∂U₁/∂z = 1`.
pub fn shear_velocity(grid: &GridSpec) -> VectorField {
    VectorField::from_fn(*grid, |[_, _, z]| [z.sin(), 2.0 * z.cos(), 0.0])
}

/// Column grid `1 × 1 × nz` on `[0,2π]³`.
pub fn shear_grid(nz: usize) -> Result<GridSpec> {
    GridSpec::periodic([1, 1, nz], [2.0 * PI; 3])
}

/// `(cos y, sin x, 0)`, whose energy maxima are stationary points of every
/// velocity component.
pub fn separable_velocity(grid: &GridSpec) -> VectorField {
    VectorField::from_fn(*grid, |[x, y, _]| [y.cos(), x.sin(), 0.0])
}

/// Unit cube box with a single cell vortex `curl(0, 0, a ψ)`, where
/// `ψ = sin²(πx) sin²(πy) sin²(πz)`; vanishes on every wall.
pub fn box_vortex_velocity(grid: &GridSpec, amplitude: f64) -> VectorField {
    let [lx, ly, lz] = grid.lengths();
    let u = VectorField::from_fn(*grid, |[x, y, z]| {
        let (sx, sy, sz) = (
            (PI * x / lx).sin(),
            (PI * y / ly).sin(),
            (PI * z / lz).sin(),
        );
        let (cx, cy) = ((PI * x / lx).cos(), (PI * y / ly).cos());
        let g = sz * sz;
        [
            amplitude * sx * sx * 2.0 * sy * cy * (PI / ly) * g,
            -amplitude * 2.0 * sx * cx * (PI / lx) * sy * sy * g,
            0.0,
        ]
    });
    u.with_zero_boundary()
}

pub fn box_grid(n: usize) -> Result<GridSpec> {
    GridSpec::new(
        [n, n, n],
        [1.0; 3],
        Boundary::NoSlipBox,
        Scheme::FiniteDifference,
    )
}
