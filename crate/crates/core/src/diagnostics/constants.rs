use serde::{Deserialize, Serialize};

use crate::fields::{ops, VectorField};
use crate::solver::Scenario;

/// Norms of the problem data that the a priori constants are built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataNorms {
    /// `max_α sup |Φ_α|`.
    pub initial_sup: f64,
    /// `||Φ||₂²`.
    pub initial_l2_sq: f64,
    /// `Σ_k ||∇Φ_k||₂²`.
    pub initial_grad_sq: f64,
    /// `max_α sup |f_α|` over the cylinder.
    pub forcing_sup: f64,
    /// `sup_t ||f||₂²`.
    pub forcing_l2_sq: f64,
    pub horizon: f64,
    pub viscosity: f64,
}

impl DataNorms {
    pub fn from_scenario(sc: &Scenario) -> Self {
        DataNorms {
            initial_sup: sc.initial().max_abs(),
            initial_l2_sq: ops::norm_l2_vector(sc.initial()).powi(2),
            initial_grad_sq: gradient_sq(sc.initial()),
            forcing_sup: sc.forcing_sup(),
            forcing_l2_sq: sc.forcing_l2().powi(2),
            horizon: sc.horizon(),
            viscosity: sc.viscosity(),
        }
    }
}

/// `Σ_k ||∇v_k||₂²`.
pub fn gradient_sq(v: &VectorField) -> f64 {
    ops::velocity_gradient(v)
        .iter()
        .flatten()
        .map(|d| ops::norm_l2(d).powi(2))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AprioriConstants {
    /// Sup-norm bound `||Φ||_C + T ||f||_C`.
    pub a1: f64,
    /// Energy-norm bound `2||Φ||² + 4T²||f||²`.
    pub a: f64,
    /// Dissipation bound `(||Φ||² + 2T²||f||²) / μ`.
    pub a2: f64,
    /// Convection bound `9 A1² A2`.
    pub a3: f64,
    /// Growth rate `3 A1² / (4μ)` of the twin-solution bound.
    pub a4: f64,
    /// Time-derivative bound `μ Σ||∇Φ_k||² + 5 A3 + 2T||f||²`.
    pub a5: f64,
    /// `A5 / μ²`.
    pub a6: f64,
    /// `A5 / μ`.
    pub a7: f64,
    /// `3 A1² A7`.
    pub a10: f64,
}

impl AprioriConstants {
    pub fn from_norms(n: &DataNorms) -> Self {
        let (t, mu) = (n.horizon, n.viscosity);
        let a1 = n.initial_sup + t * n.forcing_sup;
        let a = 2.0 * n.initial_l2_sq + 4.0 * t * t * n.forcing_l2_sq;
        let a2 = (n.initial_l2_sq + 2.0 * t * t * n.forcing_l2_sq) / mu;
        let a3 = 9.0 * a1 * a1 * a2;
        let a4 = 3.0 * a1 * a1 / (4.0 * mu);
        let a5 = mu * n.initial_grad_sq + 5.0 * a3 + 2.0 * t * n.forcing_l2_sq;
        let a6 = a5 / (mu * mu);
        let a7 = a5 / mu;
        let a10 = 3.0 * a1 * a1 * a7;
        AprioriConstants {
            a1,
            a,
            a2,
            a3,
            a4,
            a5,
            a6,
            a7,
            a10,
        }
    }

    pub fn from_scenario(sc: &Scenario) -> Self {
        Self::from_norms(&DataNorms::from_scenario(sc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norms() -> DataNorms {
        DataNorms {
            initial_sup: 1.0,
            initial_l2_sq: 1.0,
            initial_grad_sq: 0.0,
            forcing_sup: 0.5,
            forcing_l2_sq: 0.25,
            horizon: 2.0,
            viscosity: 0.5,
        }
    }

    #[test]
    fn published_coefficients() {
        let c = AprioriConstants::from_norms(&norms());
        assert_eq!(c.a, 6.0);
        assert_eq!(c.a1, 2.0);
        assert_eq!(c.a4, 3.0 / 0.5);
        assert_eq!(c.a2, (1.0 + 2.0 * 4.0 * 0.25) / 0.5);
        assert_eq!(c.a3, 9.0 * 4.0 * c.a2);
        assert_eq!(c.a5, 5.0 * c.a3 + 2.0 * 2.0 * 0.25);
        assert_eq!(c.a10, 3.0 * 4.0 * c.a7);
    }

    #[test]
    fn constants_are_non_negative_and_vanish_for_rest() {
        let zero = DataNorms {
            initial_sup: 0.0,
            initial_l2_sq: 0.0,
            forcing_sup: 0.0,
            forcing_l2_sq: 0.0,
            ..norms()
        };
        let c = AprioriConstants::from_norms(&zero);
        for v in [c.a1, c.a, c.a2, c.a3, c.a4, c.a5, c.a6, c.a7, c.a10] {
            assert_eq!(v, 0.0);
        }
    }
}
