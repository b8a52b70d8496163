//! Differential operators, products and norms. Every operator dispatches on
//! the grid's scheme: Fourier collocation or second-order differences.

use crate::error::Result;
use crate::fields::{fd, spectral, GridSpec, ScalarField, Scheme, VectorField};

fn is_spectral(grid: &GridSpec) -> bool {
    grid.scheme == Scheme::Spectral
}

pub fn partial(s: &ScalarField, axis: usize) -> ScalarField {
    if !s.grid().is_active(axis) {
        return ScalarField::zeros(*s.grid());
    }
    if is_spectral(s.grid()) {
        spectral::inverse(spectral::forward(s).derivative(axis))
    } else {
        fd::partial(s, axis)
    }
}

/// `∂²s / ∂x_a ∂x_b`. Diagonal entries use the compact second difference on
/// finite-difference grids.
pub fn second_partial(s: &ScalarField, a: usize, b: usize) -> ScalarField {
    let grid = *s.grid();
    if !grid.is_active(a) || !grid.is_active(b) {
        return ScalarField::zeros(grid);
    }
    if is_spectral(&grid) {
        spectral::inverse(spectral::forward(s).second_derivative(a, b))
    } else if a == b {
        fd::second_partial(s, a)
    } else {
        fd::partial(&fd::partial(s, a), b)
    }
}

pub fn gradient(s: &ScalarField) -> VectorField {
    let grid = *s.grid();
    if is_spectral(&grid) {
        let sp = spectral::forward(s);
        VectorField::from_components(std::array::from_fn(|a| {
            if grid.is_active(a) {
                spectral::inverse(sp.derivative(a))
            } else {
                ScalarField::zeros(grid)
            }
        }))
    } else {
        VectorField::from_components(std::array::from_fn(|a| partial(s, a)))
    }
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let grid = *v.grid();
    let mut acc = vec![0.0; grid.len()];
    for a in grid.active_axes() {
        let d = partial(v.component(a), a);
        for (x, y) in acc.iter_mut().zip(d.values()) {
            *x += y;
        }
    }
    ScalarField::from_raw(grid, acc)
}

/// `∇U` as `g[alpha][beta] = ∂U_alpha / ∂x_beta`.
pub fn velocity_gradient(u: &VectorField) -> [[ScalarField; 3]; 3] {
    std::array::from_fn(|alpha| {
        let g = gradient(u.component(alpha));
        g.into_components()
    })
}

pub fn curl(v: &VectorField) -> VectorField {
    let g = velocity_gradient(v);
    VectorField::from_components([
        &g[2][1] - &g[1][2],
        &g[0][2] - &g[2][0],
        &g[1][0] - &g[0][1],
    ])
}

pub fn laplacian(s: &ScalarField) -> ScalarField {
    let grid = *s.grid();
    if is_spectral(&grid) {
        return spectral::inverse(spectral::forward(s).laplacian());
    }
    let mut acc = vec![0.0; grid.len()];
    for a in grid.active_axes() {
        let d = fd::second_partial(s, a);
        for (x, y) in acc.iter_mut().zip(d.values()) {
            *x += y;
        }
    }
    ScalarField::from_raw(grid, acc)
}

pub fn vector_laplacian(v: &VectorField) -> VectorField {
    v.map_components(laplacian)
}

/// 2/3-rule truncation on spectral grids; identity otherwise.
pub fn dealias(s: &ScalarField) -> ScalarField {
    if is_spectral(s.grid()) {
        spectral::inverse(spectral::forward(s).dealiased())
    } else {
        s.clone()
    }
}

pub fn dealias_vector(v: &VectorField) -> VectorField {
    v.map_components(dealias)
}

/// Keeps modes with `|m| <= n/divisor` on spectral grids; identity otherwise.
pub fn lowpass(s: &ScalarField, divisor: usize) -> ScalarField {
    if is_spectral(s.grid()) {
        spectral::inverse(spectral::forward(s).truncated(divisor))
    } else {
        s.clone()
    }
}

/// Quadrature inner product `Σ a b w` with the grid's weights.
pub fn inner_l2(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    a.check_grid(b)?;
    let w = a.grid().weights();
    Ok(a.values()
        .iter()
        .zip(b.values())
        .zip(&w)
        .map(|((x, y), w)| x * y * w)
        .sum())
}

pub fn inner_l2_vector(a: &VectorField, b: &VectorField) -> Result<f64> {
    a.check_grid(b)?;
    let mut total = 0.0;
    for c in 0..3 {
        total += inner_l2(a.component(c), b.component(c))?;
    }
    Ok(total)
}

pub fn norm_l2(s: &ScalarField) -> f64 {
    inner_l2(s, s).expect("same field").max(0.0).sqrt()
}

pub fn norm_l2_vector(v: &VectorField) -> f64 {
    inner_l2_vector(v, v).expect("same field").max(0.0).sqrt()
}

pub fn norm_linf(s: &ScalarField) -> f64 {
    s.max_abs()
}

/// Weighted average over the domain.
pub fn mean(s: &ScalarField) -> f64 {
    let w = s.grid().weights();
    s.values().iter().zip(&w).map(|(v, w)| v * w).sum::<f64>() / s.grid().volume()
}

pub fn integral(s: &ScalarField) -> f64 {
    mean(s) * s.grid().volume()
}

/// `E = |U|^2 / 2` pointwise.
pub fn kinetic_energy_density(u: &VectorField) -> ScalarField {
    let grid = *u.grid();
    let [x, y, z] = u.components();
    ScalarField::from_raw(
        grid,
        (0..grid.len())
            .map(|i| 0.5 * (x.values()[i].powi(2) + y.values()[i].powi(2) + z.values()[i].powi(2)))
            .collect(),
    )
}

pub fn dot(u: &VectorField, w: &VectorField) -> Result<ScalarField> {
    u.check_grid(w)?;
    let grid = *u.grid();
    Ok(ScalarField::from_raw(
        grid,
        (0..grid.len())
            .map(|i| {
                (0..3)
                    .map(|c| u.component(c).values()[i] * w.component(c).values()[i])
                    .sum()
            })
            .collect(),
    ))
}

/// Pointwise vector product `[u, w]`.
pub fn cross(u: &VectorField, w: &VectorField) -> Result<VectorField> {
    u.check_grid(w)?;
    let grid = *u.grid();
    let c = |a: usize, i: usize| u.component(a).values()[i];
    let d = |a: usize, i: usize| w.component(a).values()[i];
    let n = grid.len();
    Ok(VectorField::from_components([
        ScalarField::from_raw(
            grid,
            (0..n)
                .map(|i| c(1, i) * d(2, i) - c(2, i) * d(1, i))
                .collect(),
        ),
        ScalarField::from_raw(
            grid,
            (0..n)
                .map(|i| c(2, i) * d(0, i) - c(0, i) * d(2, i))
                .collect(),
        ),
        ScalarField::from_raw(
            grid,
            (0..n)
                .map(|i| c(0, i) * d(1, i) - c(1, i) * d(0, i))
                .collect(),
        ),
    ]))
}

/// `(U, ∇)U` with components `Σ_beta U_beta ∂U_alpha/∂x_beta`.
pub fn convection(u: &VectorField) -> VectorField {
    convection_from_gradient(u, &velocity_gradient(u))
}

pub(crate) fn convection_from_gradient(u: &VectorField, g: &[[ScalarField; 3]; 3]) -> VectorField {
    let grid = *u.grid();
    VectorField::from_components(std::array::from_fn(|alpha| {
        ScalarField::from_raw(
            grid,
            (0..grid.len())
                .map(|i| {
                    (0..3)
                        .map(|beta| u.component(beta).values()[i] * g[alpha][beta].values()[i])
                        .sum()
                })
                .collect(),
        )
    }))
}

/// `Σ_alpha |∇U_alpha|^2` pointwise.
pub fn gradient_energy_density(g: &[[ScalarField; 3]; 3]) -> ScalarField {
    let grid = *g[0][0].grid();
    ScalarField::from_raw(
        grid,
        (0..grid.len())
            .map(|i| {
                g.iter()
                    .flat_map(|row| row.iter())
                    .map(|d| d.values()[i].powi(2))
                    .sum()
            })
            .collect(),
    )
}

/// `Σ_{alpha,beta} ∂U_alpha/∂x_beta ∂U_beta/∂x_alpha` pointwise, the source
/// of the pressure Poisson equation.
pub fn gradient_contraction(g: &[[ScalarField; 3]; 3]) -> ScalarField {
    let grid = *g[0][0].grid();
    ScalarField::from_raw(
        grid,
        (0..grid.len())
            .map(|i| {
                let mut s = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        s += g[a][b].values()[i] * g[b][a].values()[i];
                    }
                }
                s
            })
            .collect(),
    )
}

/// Trapezoid rule for uniformly spaced samples.
pub fn trapezoid(samples: &[f64], step: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            step * (0.5 * samples[0] + samples[1..n - 1].iter().sum::<f64>() + 0.5 * samples[n - 1])
        }
    }
}
