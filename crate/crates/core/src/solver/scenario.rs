use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Assumption, Error, Result};
use crate::fields::{ops, Boundary, GridSpec, Scheme, VectorField};
use crate::helmholtz;

/// Largest admissible advective Courant number and diffusion number.
pub const CFL_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    Euler,
    /// Explicit midpoint rule.
    #[default]
    Rk2,
}

/// Time-independent body force from a fixed family of analytic profiles.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Forcing {
    #[default]
    None,
    /// Spatially constant force.
    Uniform { value: [f64; 3] },
    /// `f = (A sin(2π m y / ly), 0, 0)`.
    Kolmogorov { amplitude: f64, mode: u32 },
}

impl Forcing {
    pub fn is_zero(&self) -> bool {
        match self {
            Forcing::None => true,
            Forcing::Uniform { value } => value.iter().all(|&v| v == 0.0),
            Forcing::Kolmogorov { amplitude, .. } => *amplitude == 0.0,
        }
    }

    pub fn field(&self, grid: &GridSpec) -> Option<VectorField> {
        if self.is_zero() {
            return None;
        }
        Some(match *self {
            Forcing::None => unreachable!(),
            Forcing::Uniform { value } => VectorField::constant(*grid, value),
            Forcing::Kolmogorov { amplitude, mode } => {
                let ly = grid.ly;
                VectorField::from_fn(*grid, |[_, y, _]| {
                    [
                        amplitude * (2.0 * PI * mode as f64 * y / ly).sin(),
                        0.0,
                        0.0,
                    ]
                })
            }
        })
    }
}

/// Relative divergence `||div v|| / ||∇v||` accepted as solenoidal.
pub fn solenoidal_tolerance(grid: &GridSpec) -> f64 {
    match grid.scheme {
        Scheme::Spectral => 1e-8,
        Scheme::FiniteDifference => {
            1e-8 + 10.0 * (PI * grid.max_spacing() / grid.min_active_length()).powi(2)
        }
    }
}

/// `||div v||₂ / (Σ ||∇v_α||₂²)^½`, zero for a zero field.
pub fn relative_divergence(v: &VectorField) -> f64 {
    let div = ops::norm_l2(&ops::divergence(v));
    let grad: f64 = ops::velocity_gradient(v)
        .iter()
        .flat_map(|row| row.iter())
        .map(|d| ops::norm_l2(d).powi(2))
        .sum::<f64>()
        .sqrt();
    if grad > 0.0 {
        div / grad
    } else {
        div
    }
}

/// Sum of `1/h²` over active directions.
fn inverse_spacing_sq(grid: &GridSpec) -> f64 {
    let h = grid.spacing();
    grid.active_axes()
        .iter()
        .map(|&a| 1.0 / (h[a] * h[a]))
        .sum()
}

pub fn advective_courant(u: &VectorField, dt: f64) -> f64 {
    u.max_magnitude() * dt / u.grid().min_spacing()
}

pub fn diffusion_number(grid: &GridSpec, viscosity: f64, dt: f64) -> f64 {
    viscosity * dt * inverse_spacing_sq(grid)
}

/// A fully specified initial-boundary-value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    name: String,
    viscosity: f64,
    horizon: f64,
    dt: f64,
    initial: VectorField,
    forcing: Forcing,
    forcing_field: Option<VectorField>,
    integrator: Integrator,
}

impl Scenario {
    /// Builds and validates an unforced RK2 scenario.
    pub fn new(
        name: impl Into<String>,
        initial: VectorField,
        viscosity: f64,
        horizon: f64,
        dt: f64,
    ) -> Result<Self> {
        let s = Scenario {
            name: name.into(),
            viscosity,
            horizon,
            dt,
            initial,
            forcing: Forcing::None,
            forcing_field: None,
            integrator: Integrator::Rk2,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_forcing(mut self, forcing: Forcing) -> Result<Self> {
        self.forcing_field = forcing.field(self.grid());
        self.forcing = forcing;
        self.validate()?;
        Ok(self)
    }

    pub fn with_integrator(mut self, integrator: Integrator) -> Self {
        self.integrator = integrator;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn grid(&self) -> &GridSpec {
        self.initial.grid()
    }
    pub fn viscosity(&self) -> f64 {
        self.viscosity
    }
    pub fn horizon(&self) -> f64 {
        self.horizon
    }
    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn initial(&self) -> &VectorField {
        &self.initial
    }
    pub fn forcing(&self) -> &Forcing {
        &self.forcing
    }
    /// Sampled body force; `None` when identically zero.
    pub fn forcing_field(&self) -> Option<&VectorField> {
        self.forcing_field.as_ref()
    }
    pub fn integrator(&self) -> Integrator {
        self.integrator
    }

    /// Number of steps to reach the horizon.
    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    /// `max_α sup |f_α|` over the cylinder (the force is time-independent).
    pub fn forcing_sup(&self) -> f64 {
        self.forcing_field.as_ref().map_or(0.0, |f| f.max_abs())
    }

    /// `sup_t ||f||₂`.
    pub fn forcing_l2(&self) -> f64 {
        self.forcing_field.as_ref().map_or(0.0, ops::norm_l2_vector)
    }

    fn validate(&self) -> Result<()> {
        use Assumption::*;
        let bad = |a, d: String| Err(Error::validation(a, d));
        let grid = *self.grid();
        grid.validate()?;
        if !(self.viscosity.is_finite() && self.viscosity > 0.0) {
            return bad(
                Parameters,
                format!("viscosity must be positive, got {}", self.viscosity),
            );
        }
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return bad(
                Parameters,
                format!("horizon must be non-negative, got {}", self.horizon),
            );
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(
                Parameters,
                format!("time step must be positive, got {}", self.dt),
            );
        }
        let steps = self.horizon / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return bad(
                Parameters,
                format!(
                    "horizon {} is not a multiple of dt {}",
                    self.horizon, self.dt
                ),
            );
        }
        if !self.initial.is_finite() {
            return bad(
                SolenoidalInitialData,
                "initial velocity has non-finite values".into(),
            );
        }

        let tol = solenoidal_tolerance(&grid);
        let div = relative_divergence(&self.initial);
        if div > tol {
            return bad(
                SolenoidalInitialData,
                format!("relative divergence {div:.3e} exceeds {tol:.3e}"),
            );
        }
        if grid.bc == Boundary::NoSlipBox {
            let wall = wall_sup(&self.initial);
            if wall > 1e-12 * self.initial.max_abs() {
                return bad(
                    SolenoidalInitialData,
                    format!("velocity {wall:.3e} on the wall"),
                );
            }
        }
        if let Some(f) = &self.forcing_field {
            if !f.is_finite() {
                return bad(SolenoidalForcing, "forcing has non-finite values".into());
            }
            let div = relative_divergence(f);
            if div > tol {
                return bad(
                    SolenoidalForcing,
                    format!("relative divergence {div:.3e} exceeds {tol:.3e}"),
                );
            }
        }

        let courant = advective_courant(&self.initial, self.dt);
        if courant > CFL_LIMIT {
            return bad(
                TimeStepLimit,
                format!("advective Courant number {courant:.3} exceeds {CFL_LIMIT}"),
            );
        }
        let diff = diffusion_number(&grid, self.viscosity, self.dt);
        if diff > CFL_LIMIT {
            return bad(
                TimeStepLimit,
                format!("diffusion number {diff:.3} exceeds {CFL_LIMIT}"),
            );
        }
        Ok(())
    }
}

/// Largest velocity magnitude over wall nodes (zero on periodic grids).
pub fn wall_sup(u: &VectorField) -> f64 {
    let grid = *u.grid();
    if grid.bc == Boundary::Periodic {
        return 0.0;
    }
    (0..grid.len())
        .filter(|&i| grid.is_boundary_node(grid.unravel(i)))
        .map(|i| {
            let v = u.at(grid.unravel(i));
            (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Solenoidal, wall-compatible version of arbitrary initial data.
pub fn project_initial(u: &VectorField) -> Result<VectorField> {
    let zeroed = match u.grid().bc {
        Boundary::Periodic => u.clone(),
        Boundary::NoSlipBox => u.with_zero_boundary(),
    };
    let p = helmholtz::project_solenoidal(&zeroed)?;
    Ok(match u.grid().bc {
        Boundary::Periodic => p,
        Boundary::NoSlipBox => p.with_zero_boundary(),
    })
}
