//! Poisson solvers for `-ΔV = φ`.
//!
//! Periodic grids are solved by FFT with the scheme's own Laplacian symbol.
//! On a walled box the homogeneous Neumann problem is solved directly in the
//! type-I cosine basis, which diagonalizes the even-reflection Laplacian; a
//! conjugate-gradient path on the same operator is kept as a fallback.
//! The mean of `φ` is removed before solving and reported as the
//! compatibility defect; solutions are normalized to zero mean.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{ops, spectral, Boundary, GridSpec, ScalarField, Scheme};

/// Relative compatibility tolerance `|mean φ| <= tol ||φ||`.
pub const DEFAULT_COMPAT_TOL: f64 = 1e-8;
pub const CG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonResult {
    pub solution: ScalarField,
    /// `||-ΔV - (φ - mean φ)|| / ||φ||` with the operator actually inverted.
    pub residual_norm: f64,
    /// `|mean φ|`, the part of the right side outside the operator's range.
    pub compat_defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeumannMethod {
    #[default]
    Cosine,
    ConjugateGradient,
}

/// Neumann problem on a box (or the periodic problem on a periodic grid).
/// Fails with `CompatibilityViolation` when the mean of `φ` is not
/// negligible relative to its norm.
pub fn solve_poisson_neumann(phi: &ScalarField, tol: f64) -> Result<PoissonResult> {
    solve_poisson_neumann_with(phi, tol, NeumannMethod::Cosine)
}

pub fn solve_poisson_neumann_with(
    phi: &ScalarField,
    tol: f64,
    method: NeumannMethod,
) -> Result<PoissonResult> {
    let defect = ops::mean(phi).abs();
    let threshold = tol * ops::norm_l2(phi);
    if defect > threshold {
        return Err(Error::CompatibilityViolation { defect, threshold });
    }
    match phi.grid().bc {
        Boundary::Periodic => solve_poisson_periodic(phi),
        Boundary::NoSlipBox => match method {
            NeumannMethod::Cosine => Ok(finish(phi, cosine_solve(phi), defect)),
            NeumannMethod::ConjugateGradient => {
                let v = cg_solve(phi)?;
                Ok(finish(phi, v, defect))
            }
        },
    }
}

/// Periodic problem. The zero mode is removed and recorded, never rejected.
pub fn solve_poisson_periodic(phi: &ScalarField) -> Result<PoissonResult> {
    let grid = *phi.grid();
    if grid.bc != Boundary::Periodic {
        return Err(Error::InvalidGrid(
            "periodic Poisson solve on a walled grid".into(),
        ));
    }
    let defect = ops::mean(phi).abs();
    let symbol = periodic_symbol(&grid);
    let mut sp = spectral::forward(phi);
    for (c, s) in sp.data.iter_mut().zip(&symbol) {
        *c = if *s > 0.0 {
            *c / *s
        } else {
            Complex64::default()
        };
    }
    let v = spectral::inverse(sp);
    Ok(finish(phi, v, defect))
}

/// Dispatches on the boundary kind with the given compatibility tolerance.
pub fn solve(phi: &ScalarField, tol: f64) -> Result<PoissonResult> {
    solve_poisson_neumann(phi, tol)
}

/// Eigenvalues of `-Δ` in FFT order.
fn periodic_symbol(grid: &GridSpec) -> Vec<f64> {
    let dims = grid.dims();
    let h = grid.spacing();
    let per_axis: [Vec<f64>; 3] = std::array::from_fn(|a| match grid.scheme {
        Scheme::Spectral => spectral::wavenumbers(grid, a)
            .into_iter()
            .map(|k| k * k)
            .collect(),
        Scheme::FiniteDifference => {
            if dims[a] == 1 {
                vec![0.0]
            } else {
                (0..dims[a])
                    .map(|m| 4.0 / (h[a] * h[a]) * (PI * m as f64 / dims[a] as f64).sin().powi(2))
                    .collect()
            }
        }
    });
    let [nx, ny, nz] = dims;
    let mut out = Vec::with_capacity(grid.len());
    for l in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                out.push(per_axis[0][i] + per_axis[1][j] + per_axis[2][l]);
            }
        }
    }
    out
}

fn laplacian_for(grid: &GridSpec, v: &ScalarField) -> ScalarField {
    match grid.bc {
        Boundary::Periodic => ops::laplacian(v),
        Boundary::NoSlipBox => crate::fields::neumann_laplacian(v),
    }
}

fn finish(phi: &ScalarField, v: ScalarField, defect: f64) -> PoissonResult {
    let grid = *phi.grid();
    let m = ops::mean(&v);
    let solution = v.map(|x| x - m);
    let phi_mean = ops::mean(phi);
    let lap = laplacian_for(&grid, &solution);
    let res = ScalarField::from_raw(
        grid,
        lap.values()
            .iter()
            .zip(phi.values())
            .map(|(l, p)| -l - (p - phi_mean))
            .collect(),
    );
    let scale = ops::norm_l2(phi);
    let residual_norm = if scale > 0.0 {
        ops::norm_l2(&res) / scale
    } else {
        ops::norm_l2(&res)
    };
    PoissonResult {
        solution,
        residual_norm,
        compat_defect: defect,
    }
}

/// In-place unnormalized DCT-I along one axis via an even-extension FFT:
/// `X_k = x_0 + (-1)^k x_{n-1} + 2 Σ_{j=1}^{n-2} x_j cos(π j k / (n-1))`.
fn dct1_axis(data: &mut [f64], dims: [usize; 3], axis: usize) {
    let n = dims[axis];
    let m = 2 * (n - 1);
    let stride = [1, dims[0], dims[0] * dims[1]][axis];
    let lines: Vec<usize> = (0..data.len())
        .filter(|&idx| {
            let ijk = [
                idx % dims[0],
                (idx / dims[0]) % dims[1],
                idx / (dims[0] * dims[1]),
            ];
            ijk[axis] == 0
        })
        .collect();
    let mut buf = vec![Complex64::default(); lines.len() * m];
    for (l, &start) in lines.iter().enumerate() {
        let line = &mut buf[l * m..(l + 1) * m];
        for j in 0..n {
            line[j] = Complex64::new(data[start + j * stride], 0.0);
        }
        for j in 1..n - 1 {
            line[m - j] = line[j];
        }
    }
    // Lines are contiguous in `buf`, so a batched transform along axis 0 does them all.
    spectral::transform_axis(&mut buf, [m, lines.len(), 1], 0, false);
    for (l, &start) in lines.iter().enumerate() {
        for k in 0..n {
            data[start + k * stride] = buf[l * m + k].re;
        }
    }
}

fn cosine_solve(phi: &ScalarField) -> ScalarField {
    let grid = *phi.grid();
    let dims = grid.dims();
    let h = grid.spacing();
    let mut data = phi.values().to_vec();
    for axis in 0..3 {
        dct1_axis(&mut data, dims, axis);
    }
    let eig: [Vec<f64>; 3] = std::array::from_fn(|a| {
        (0..dims[a])
            .map(|k| {
                4.0 / (h[a] * h[a]) * (PI * k as f64 / (2.0 * (dims[a] - 1) as f64)).sin().powi(2)
            })
            .collect()
    });
    for (idx, v) in data.iter_mut().enumerate() {
        let [i, j, k] = grid.unravel(idx);
        let lambda = eig[0][i] + eig[1][j] + eig[2][k];
        *v = if idx == 0 { 0.0 } else { *v / lambda };
    }
    for axis in 0..3 {
        dct1_axis(&mut data, dims, axis);
    }
    let scale: f64 = dims.iter().map(|&n| 1.0 / (2.0 * (n - 1) as f64)).product();
    ScalarField::from_raw(grid, data.into_iter().map(|v| v * scale).collect())
}

/// Conjugate gradients on the even-reflection Neumann Laplacian, which is
/// symmetric in the trapezoid-weighted inner product.
fn cg_solve(phi: &ScalarField) -> Result<ScalarField> {
    let grid = *phi.grid();
    let w = grid.weights();
    let dotw = |a: &[f64], b: &[f64]| -> f64 {
        a.iter().zip(b).zip(&w).map(|((x, y), w)| x * y * w).sum()
    };
    let phi_mean = ops::mean(phi);
    let b: Vec<f64> = phi.values().iter().map(|v| v - phi_mean).collect();
    let b_norm = dotw(&b, &b).sqrt();
    let mut x = vec![0.0; grid.len()];
    if b_norm == 0.0 {
        return Ok(ScalarField::from_raw(grid, x));
    }
    let apply = |v: &[f64]| -> Vec<f64> {
        let lap = crate::fields::neumann_laplacian(&ScalarField::from_raw(grid, v.to_vec()));
        lap.values().iter().map(|l| -l).collect()
    };
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = dotw(&r, &r);
    let max_iter = 10 * grid.len();
    for _ in 0..max_iter {
        let ap = apply(&p);
        let alpha = rs / dotw(&p, &ap);
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new = dotw(&r, &r);
        if rs_new.sqrt() <= CG_TOL * b_norm {
            return Ok(ScalarField::from_raw(grid, x));
        }
        let beta = rs_new / rs;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
        rs = rs_new;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: rs.sqrt() / b_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boxgrid(n: [usize; 3], l: [f64; 3]) -> GridSpec {
        GridSpec::new(n, l, Boundary::NoSlipBox, Scheme::FiniteDifference).unwrap()
    }

    #[test]
    fn zero_rhs_gives_zero_solution() {
        let g = boxgrid([8, 8, 8], [1.0; 3]);
        let r = solve_poisson_neumann(&ScalarField::zeros(g), DEFAULT_COMPAT_TOL).unwrap();
        assert_eq!(r.solution.max_abs(), 0.0);
        let p = GridSpec::periodic([8, 8, 1], [1.0; 3]).unwrap();
        let r = solve_poisson_periodic(&ScalarField::zeros(p)).unwrap();
        assert_eq!(r.solution.max_abs(), 0.0);
    }

    #[test]
    fn constant_rhs_is_incompatible() {
        let g = boxgrid([8, 8, 8], [2.0, 1.0, 1.0]);
        let err = solve_poisson_neumann(&ScalarField::constant(g, 1.0), DEFAULT_COMPAT_TOL);
        assert!(matches!(err, Err(Error::CompatibilityViolation { .. })));
    }

    #[test]
    fn cosine_mode_matches_manufactured_solution() {
        let l = 2.0;
        let g = boxgrid([33, 4, 4], [l, 1.0, 1.0]);
        let phi = ScalarField::from_fn(g, |[x, _, _]| (PI * x / l).cos());
        let r = solve_poisson_neumann(&phi, DEFAULT_COMPAT_TOL).unwrap();
        let exact = ScalarField::from_fn(g, |[x, _, _]| (l / PI).powi(2) * (PI * x / l).cos());
        let err = (&r.solution - &exact).max_abs() / exact.max_abs();
        assert!(err < 2e-3, "relative error {err}");
        assert!(r.residual_norm < 1e-12);
        assert!(ops::mean(&r.solution).abs() < 1e-12);
    }

    #[test]
    fn conjugate_gradient_agrees_with_cosine_solve() {
        let g = boxgrid([9, 7, 6], [1.0, 1.5, 0.8]);
        let phi = ScalarField::from_fn(g, |[x, y, z]| {
            (PI * x).cos() * (2.0 * PI * y / 1.5).cos() + (PI * z / 0.8).cos()
        });
        let a =
            solve_poisson_neumann_with(&phi, DEFAULT_COMPAT_TOL, NeumannMethod::Cosine).unwrap();
        let b =
            solve_poisson_neumann_with(&phi, DEFAULT_COMPAT_TOL, NeumannMethod::ConjugateGradient)
                .unwrap();
        assert!((&a.solution - &b.solution).max_abs() < 1e-8);
        assert!(b.residual_norm < 1e-9);
    }

    #[test]
    fn periodic_sine_inverts_exactly() {
        let l = 3.0;
        let g = GridSpec::periodic([32, 4, 1], [l, 1.0, 1.0]).unwrap();
        let k = 2.0 * PI / l;
        let phi = ScalarField::from_fn(g, |[x, _, _]| (k * x).sin());
        let r = solve_poisson_periodic(&phi).unwrap();
        let exact = ScalarField::from_fn(g, |[x, _, _]| (k * x).sin() / (k * k));
        assert!((&r.solution - &exact).max_abs() < 1e-10);
    }

    #[test]
    fn periodic_records_and_removes_the_mean() {
        let g = GridSpec::periodic([16, 16, 1], [1.0; 3]).unwrap();
        let phi = ScalarField::from_fn(g, |[x, y, _]| {
            0.25 + (2.0 * PI * x).cos() * (2.0 * PI * y).sin()
        });
        let r = solve_poisson_periodic(&phi).unwrap();
        assert!((r.compat_defect - 0.25).abs() < 1e-12);
        let back = -&ops::laplacian(&r.solution);
        let free = phi.map(|v| v - 0.25);
        assert!((&back - &free).max_abs() < 1e-10);
    }

    #[test]
    fn finite_difference_periodic_uses_compact_symbol() {
        let g = GridSpec::new(
            [16, 12, 1],
            [1.0, 1.0, 1.0],
            Boundary::Periodic,
            Scheme::FiniteDifference,
        )
        .unwrap();
        let phi = ScalarField::from_fn(g, |[x, y, _]| (2.0 * PI * x).sin() + (4.0 * PI * y).cos());
        let r = solve_poisson_periodic(&phi).unwrap();
        assert!(r.residual_norm < 1e-12);
    }
}
