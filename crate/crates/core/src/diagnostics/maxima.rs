use serde::{Deserialize, Serialize};

use crate::fields::{Boundary, GridSpec, ScalarField};

/// Relative plateau tolerance used when none is given.
pub const PLATEAU_TOL: f64 = 1e-12;

/// A grid node where a scalar field has a local maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaximumSite {
    pub index: usize,
    pub ijk: [usize; 3],
    pub coords: [f64; 3],
    pub value: f64,
}

/// Offsets of the full neighborhood (every combination of -1, 0, 1 over the
/// active directions, minus the centre): 26 in 3-D, 8 in 2-D, 2 in 1-D.
fn neighbor_offsets(grid: &GridSpec) -> Vec<[isize; 3]> {
    let span = |a: usize| if grid.is_active(a) { -1..=1 } else { 0..=0 };
    let mut out = Vec::new();
    for dz in span(2) {
        for dy in span(1) {
            for dx in span(0) {
                if (dx, dy, dz) != (0, 0, 0) {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

/// Interior nodes that are `>=` every neighbor (up to `plateau_tol`) and
/// strictly above at least one. Box walls are never sites; periodic grids
/// wrap. `plateau_tol` is absolute.
pub fn find_interior_maxima(e: &ScalarField, plateau_tol: f64) -> Vec<MaximumSite> {
    let grid = *e.grid();
    let dims = grid.dims();
    let offsets = neighbor_offsets(&grid);
    let periodic = grid.bc == Boundary::Periodic;
    let vals = e.values();
    let mut sites = Vec::new();
    'nodes: for idx in 0..grid.len() {
        let ijk = grid.unravel(idx);
        if !periodic && grid.is_boundary_node(ijk) {
            continue;
        }
        let v = vals[idx];
        let mut strict = false;
        for off in &offsets {
            let n: [usize; 3] = std::array::from_fn(|a| {
                let m = dims[a] as isize;
                (ijk[a] as isize + off[a]).rem_euclid(m) as usize
            });
            let w = vals[grid.index(n[0], n[1], n[2])];
            if v < w - plateau_tol {
                continue 'nodes;
            }
            if v > w + plateau_tol {
                strict = true;
            }
        }
        if strict {
            sites.push(MaximumSite {
                index: idx,
                ijk,
                coords: grid.coords(ijk),
                value: v,
            });
        }
    }
    sites
}

/// [`find_interior_maxima`] with the default relative plateau tolerance.
pub fn interior_maxima(e: &ScalarField) -> Vec<MaximumSite> {
    find_interior_maxima(e, PLATEAU_TOL * e.max_abs())
}
