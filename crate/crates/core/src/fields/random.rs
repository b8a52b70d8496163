//! Seeded band-limited random fields for perturbations and property tests.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fields::{ops, Boundary, GridSpec, ScalarField, VectorField};

fn mode_ranges(grid: &GridSpec, max_mode: i64) -> [Vec<i64>; 3] {
    std::array::from_fn(|a| {
        if !grid.is_active(a) {
            vec![0]
        } else {
            match grid.bc {
                Boundary::Periodic => (-max_mode..=max_mode).collect(),
                Boundary::NoSlipBox => (1..=max_mode).collect(),
            }
        }
    })
}

fn random_scalar(grid: &GridSpec, rng: &mut ChaCha8Rng, max_mode: i64) -> ScalarField {
    let modes = mode_ranges(grid, max_mode);
    let l = grid.lengths();
    let mut terms = Vec::new();
    for &mx in &modes[0] {
        for &my in &modes[1] {
            for &mz in &modes[2] {
                let m = [mx, my, mz];
                if m.iter().all(|&v| v == 0) {
                    continue;
                }
                let decay = 1.0 / (1.0 + (mx * mx + my * my + mz * mz) as f64);
                let a: f64 = rng.gen_range(-1.0..1.0) * decay;
                let b: f64 = rng.gen_range(-1.0..1.0) * decay;
                terms.push((m, a, b));
            }
        }
    }
    match grid.bc {
        Boundary::Periodic => ScalarField::from_fn(*grid, |x| {
            terms
                .iter()
                .map(|(m, a, b)| {
                    let phase: f64 = (0..3).map(|d| 2.0 * PI * m[d] as f64 * x[d] / l[d]).sum();
                    a * phase.cos() + b * phase.sin()
                })
                .sum()
        }),
        Boundary::NoSlipBox => ScalarField::from_fn(*grid, |x| {
            terms
                .iter()
                .map(|(m, a, _)| {
                    a * (0..3)
                        .map(|d| (PI * m[d] as f64 * x[d] / l[d]).sin())
                        .product::<f64>()
                })
                .sum()
        }),
    }
}

/// Product of `sin(pi x_d / l_d)` over active directions; vanishes on box walls.
fn wall_envelope(grid: &GridSpec) -> ScalarField {
    let l = grid.lengths();
    let active = grid.active_axes();
    ScalarField::from_fn(*grid, |x| {
        active.iter().map(|&d| (PI * x[d] / l[d]).sin()).product()
    })
}

/// Smooth random vector field with Fourier (or sine) modes up to `max_mode`.
/// On a box it vanishes on the walls. Not solenoidal.
pub fn smooth_vector(grid: &GridSpec, seed: u64, max_mode: i64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: [ScalarField; 3] = std::array::from_fn(|_| random_scalar(grid, &mut rng, max_mode));
    let v = VectorField::from_components(raw);
    match grid.bc {
        Boundary::Periodic => v,
        Boundary::NoSlipBox => {
            let env = wall_envelope(grid);
            v.map_components(|c| c.zip_with(&env, |a, b| a * b).expect("same grid"))
        }
    }
}

/// Smooth random divergence-free field, `curl` of a random vector potential,
/// scaled so its largest component magnitude equals `amplitude`.
///
/// On a box the potential carries a squared wall envelope so the velocity
/// vanishes on the walls; solenoidality then holds to the scheme's order.
pub fn smooth_solenoidal(grid: &GridSpec, seed: u64, max_mode: i64, amplitude: f64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_501e_u64);
    let potential = VectorField::from_components(std::array::from_fn(|_| {
        random_scalar(grid, &mut rng, max_mode)
    }));
    let potential = match grid.bc {
        Boundary::Periodic => potential,
        Boundary::NoSlipBox => {
            let env = wall_envelope(grid);
            potential.map_components(|c| c.zip_with(&env, |a, b| a * b * b).expect("same grid"))
        }
    };
    let mut u = ops::curl(&potential);
    if grid.bc == Boundary::NoSlipBox {
        u = u.with_zero_boundary();
    }
    let scale = u.max_abs();
    if scale > 0.0 {
        &u * (amplitude / scale)
    } else {
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Scheme;

    #[test]
    fn seeded_fields_are_reproducible() {
        let g = GridSpec::periodic([8, 8, 8], [1.0; 3]).unwrap();
        assert_eq!(
            smooth_solenoidal(&g, 7, 2, 1.0),
            smooth_solenoidal(&g, 7, 2, 1.0)
        );
        assert_ne!(
            smooth_solenoidal(&g, 7, 2, 1.0),
            smooth_solenoidal(&g, 8, 2, 1.0)
        );
    }

    #[test]
    fn periodic_solenoidal_field_is_divergence_free() {
        let g = GridSpec::periodic([16, 16, 16], [1.0, 2.0, 1.5]).unwrap();
        let u = smooth_solenoidal(&g, 3, 3, 0.7);
        assert!((u.max_abs() - 0.7).abs() < 1e-12);
        assert!(ops::divergence(&u).max_abs() < 1e-10);
    }

    #[test]
    fn box_solenoidal_field_vanishes_on_walls() {
        let g = GridSpec::new(
            [12, 12, 12],
            [1.0; 3],
            Boundary::NoSlipBox,
            Scheme::FiniteDifference,
        )
        .unwrap();
        let u = smooth_solenoidal(&g, 3, 2, 1.0);
        for idx in 0..g.len() {
            let ijk = g.unravel(idx);
            if g.is_boundary_node(ijk) {
                assert_eq!(u.at(ijk), [0.0; 3]);
            }
        }
        let rel = ops::norm_l2(&ops::divergence(&u)) / ops::norm_l2_vector(&u);
        assert!(
            rel < 0.5,
            "divergence should be a discretization-level defect, got {rel}"
        );
    }
}
