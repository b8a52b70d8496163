//! Second-order finite differences on the collocated grid.
//!
//! Periodic axes wrap; box walls use one-sided second-order stencils.

use crate::fields::{Boundary, ScalarField};

/// Visits every grid line along `axis`, handing the kernel a strided view.
fn per_line(
    s: &ScalarField,
    axis: usize,
    kernel: impl Fn(&dyn Fn(usize) -> f64, usize) -> f64,
) -> ScalarField {
    let grid = *s.grid();
    let dims = grid.dims();
    let n = dims[axis];
    let mut out = vec![0.0; grid.len()];
    if n == 1 {
        return ScalarField::from_raw(grid, out);
    }
    let stride = [1, dims[0], dims[0] * dims[1]][axis];
    let v = s.values();
    for idx in 0..grid.len() {
        let ijk = grid.unravel(idx);
        let m = ijk[axis];
        let base = idx - m * stride;
        let get = |p: usize| v[base + p * stride];
        out[idx] = kernel(&get, m);
    }
    ScalarField::from_raw(grid, out)
}

pub(crate) fn partial(s: &ScalarField, axis: usize) -> ScalarField {
    let grid = *s.grid();
    let n = grid.dims()[axis];
    let h = grid.spacing()[axis];
    match grid.bc {
        Boundary::Periodic => per_line(s, axis, |f, m| {
            (f((m + 1) % n) - f((m + n - 1) % n)) / (2.0 * h)
        }),
        Boundary::NoSlipBox => per_line(s, axis, |f, m| {
            if m == 0 {
                (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h)
            } else if m == n - 1 {
                (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h)
            } else {
                (f(m + 1) - f(m - 1)) / (2.0 * h)
            }
        }),
    }
}

/// Compact three-point second derivative; four-point one-sided at walls.
pub(crate) fn second_partial(s: &ScalarField, axis: usize) -> ScalarField {
    let grid = *s.grid();
    let n = grid.dims()[axis];
    let h2 = grid.spacing()[axis].powi(2);
    match grid.bc {
        Boundary::Periodic => per_line(s, axis, |f, m| {
            (f((m + 1) % n) - 2.0 * f(m) + f((m + n - 1) % n)) / h2
        }),
        Boundary::NoSlipBox => per_line(s, axis, |f, m| {
            if m == 0 {
                (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / h2
            } else if m == n - 1 {
                (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / h2
            } else {
                (f(m + 1) - 2.0 * f(m) + f(m - 1)) / h2
            }
        }),
    }
}

/// Laplacian with homogeneous Neumann data imposed by even reflection
/// (`f[-1] = f[1]`). This is the operator the box Poisson solver inverts.
pub(crate) fn neumann_laplacian(s: &ScalarField) -> ScalarField {
    let grid = *s.grid();
    let mut acc = vec![0.0; grid.len()];
    for axis in grid.active_axes() {
        let n = grid.dims()[axis];
        let h2 = grid.spacing()[axis].powi(2);
        let d = per_line(s, axis, |f, m| {
            let left = if m == 0 { f(1) } else { f(m - 1) };
            let right = if m == n - 1 { f(n - 2) } else { f(m + 1) };
            (left - 2.0 * f(m) + right) / h2
        });
        for (a, b) in acc.iter_mut().zip(d.values()) {
            *a += b;
        }
    }
    ScalarField::from_raw(grid, acc)
}
