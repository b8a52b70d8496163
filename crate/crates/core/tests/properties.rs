use std::f64::consts::PI;

use proptest::prelude::*;

use nsverify::cli;
use nsverify::fields::{self, io, ops, random, GridSpec, ScalarField};
use nsverify::{helmholtz, poisson};

fn grid(n: usize) -> GridSpec {
    GridSpec::periodic([n, n, n], [2.0 * PI; 3]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn projection_is_orthogonal_and_idempotent(seed in any::<u64>(), modes in 1i64..4) {
        let w = random::smooth_vector(&grid(12), seed, modes);
        let d = helmholtz::leray_decompose(&w).unwrap();
        let scale = fields::norm_l2_vector(&w).powi(2);
        let ortho = fields::inner_l2_vector(&d.gradient_part, &d.solenoidal).unwrap().abs();
        prop_assert!(ortho <= 1e-10 * scale);
        let again = helmholtz::project_solenoidal(&d.solenoidal).unwrap();
        prop_assert!(fields::norm_l2_vector(&(&again - &d.solenoidal)) <= 1e-9 * scale.sqrt());
        prop_assert!(fields::divergence(&d.solenoidal).max_abs() <= 1e-9 * w.max_abs().max(1.0));
    }

    #[test]
    fn periodic_poisson_inverts_the_laplacian(seed in any::<u64>()) {
        let g = grid(12);
        let phi = random::smooth_vector(&g, seed, 3).component(0).clone();
        let phi = phi.map(|v| v - ops::mean(&phi));
        let v = poisson::solve_poisson_periodic(&phi).unwrap().solution;
        let back = fields::laplacian(&v).map(|x| -x);
        prop_assert!((&back - &phi).max_abs() <= 1e-9 * phi.max_abs().max(1.0));
    }

    #[test]
    fn field_files_round_trip(seed in any::<u64>(), n in 4usize..9) {
        let u = random::smooth_solenoidal(&grid(n), seed, 2, 1.0);
        let mut buf = Vec::new();
        io::write_vector(&mut buf, &u).unwrap();
        prop_assert_eq!(buf.len(), io::record_len(u.grid(), 3));
        prop_assert_eq!(io::read_record(&mut buf.as_slice()).unwrap(), io::FieldRecord::Vector(u));
    }

    #[test]
    fn energy_density_is_nonnegative_and_integrates_to_half_the_norm(seed in any::<u64>(), amp in 0.1f64..10.0) {
        let u = random::smooth_solenoidal(&grid(8), seed, 2, amp);
        let e = ops::kinetic_energy_density(&u);
        prop_assert!(e.min() >= 0.0);
        let half = 0.5 * fields::norm_l2_vector(&u).powi(2);
        prop_assert!((ops::integral(&e) - half).abs() <= 1e-12 * half.max(1.0));
    }

    #[test]
    fn scenario_configs_round_trip_through_toml(
        idx in 0usize..cli::PRESETS.len(),
        seed in any::<u64>(),
        mu in 1e-3f64..1.0,
    ) {
        let mut cfg = cli::preset(cli::PRESETS[idx].name).unwrap().reseeded(seed);
        cfg.viscosity = mu;
        let back = cli::ScenarioConfig::from_toml(&cfg.to_toml(), "roundtrip").unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn constant_fields_have_no_gradient() {
    let s = ScalarField::constant(grid(8), 3.5);
    assert!(fields::gradient(&s).max_abs() < 1e-12);
}
