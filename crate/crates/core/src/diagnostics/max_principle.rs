//! Maximum-principle monitors: the energy density against its parabolic
//! boundary data, per-component bounds, and the sup-norm estimate.

use crate::diagnostics::{AprioriConstants, ClaimRecord, Report};
use crate::fields::{ops, Boundary, GridSpec, ScalarField};
use crate::solver::Trajectory;

pub const ENERGY_MAX: &str = "energy_max_principle";
pub const COMPONENT_SUP: [&str; 3] = ["component_sup_u1", "component_sup_u2", "component_sup_u3"];
pub const COMPONENT_INF: [&str; 3] = ["component_inf_u1", "component_inf_u2", "component_inf_u3"];
pub const SUP_NORM: &str = "velocity_sup_bound";

pub type MaxPrincipleReport = Report;

/// Max and min over wall nodes, `None` on periodic grids.
fn wall_extrema(s: &ScalarField) -> Option<(f64, f64)> {
    let grid = *s.grid();
    if grid.bc == Boundary::Periodic {
        return None;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (i, &v) in s.values().iter().enumerate() {
        if grid.is_boundary_node(grid.unravel(i)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Some((hi, lo))
}

/// Largest value over interior nodes (all nodes on periodic grids), with its position.
fn interior_max(s: &ScalarField) -> (f64, [f64; 3]) {
    extremum(s, |a, b| a > b)
}

fn interior_min(s: &ScalarField) -> (f64, [f64; 3]) {
    extremum(s, |a, b| a < b)
}

fn extremum(s: &ScalarField, better: impl Fn(f64, f64) -> bool) -> (f64, [f64; 3]) {
    let grid: GridSpec = *s.grid();
    let periodic = grid.bc == Boundary::Periodic;
    let mut best: Option<(f64, usize)> = None;
    for (i, &v) in s.values().iter().enumerate() {
        if !periodic && grid.is_boundary_node(grid.unravel(i)) {
            continue;
        }
        if best.is_none_or(|(b, _)| better(v, b)) {
            best = Some((v, i));
        }
    }
    let (v, i) = best.expect("grids have interior nodes");
    (v, grid.coords(grid.unravel(i)))
}

fn tolerance(tol: f64, lhs: f64, rhs: f64) -> f64 {
    tol * lhs.abs().max(rhs.abs())
}

/// Evaluates, at every stored state: the energy-density bound by its
/// initial and lateral suprema and the per-component sup/inf bounds (both
/// derived for `f = 0`, so unforced scenarios only), and `||U||_C <= A1`.
/// `tol` is relative to the magnitude of the compared quantities.
pub fn max_principle_report(traj: &Trajectory, tol: f64) -> MaxPrincipleReport {
    let sc = traj.scenario();
    let a1 = AprioriConstants::from_scenario(sc).a1;
    let states = traj.states();
    let energies: Vec<ScalarField> = states
        .iter()
        .map(|s| ops::kinetic_energy_density(&s.velocity))
        .collect();

    let lateral = |f: &dyn Fn(usize) -> ScalarField| -> Option<(f64, f64)> {
        states
            .iter()
            .enumerate()
            .filter_map(|(k, _)| wall_extrema(&f(k)))
            .reduce(|a, b| (a.0.max(b.0), a.1.min(b.1)))
    };

    let e0 = energies[0].max();
    let e_bound = match lateral(&|k| energies[k].clone()) {
        Some((hi, _)) => e0.max(hi),
        None => e0,
    };
    let comp_bounds: [(f64, f64); 3] = std::array::from_fn(|a| {
        let init = states[0].velocity.component(a);
        let (mut hi, mut lo) = (init.max(), init.min());
        if let Some((h, l)) = lateral(&|k| states[k].velocity.component(a).clone()) {
            hi = hi.max(h);
            lo = lo.min(l);
        }
        (hi, lo)
    });

    let mut rep = Report::new("max_principle");
    let unforced = sc.forcing_field().is_none();
    for (k, s) in states.iter().enumerate() {
        let t = s.time;
        if unforced {
            let (emax, at) = interior_max(&energies[k]);
            rep.push(
                ClaimRecord::new(ENERGY_MAX, t, emax, e_bound, tolerance(tol, emax, e_bound))
                    .at(at),
            );
        }
        for a in (0..3).filter(|_| unforced) {
            let c = s.velocity.component(a);
            let (hi, at_hi) = interior_max(c);
            let (lo, at_lo) = interior_min(c);
            let (bhi, blo) = comp_bounds[a];
            rep.push(
                ClaimRecord::new(COMPONENT_SUP[a], t, hi, bhi, tolerance(tol, hi, bhi)).at(at_hi),
            );
            rep.push(
                ClaimRecord::new(COMPONENT_INF[a], t, blo, lo, tolerance(tol, lo, blo)).at(at_lo),
            );
        }
        let sup = s.velocity.max_abs();
        rep.push(ClaimRecord::new(
            SUP_NORM,
            t,
            sup,
            a1,
            tolerance(tol, sup, a1),
        ));
    }
    rep
}
