//! Structured-grid scalar and vector fields with their differential operators.

mod fd;
mod field;
mod grid;
pub mod io;
pub mod ops;
pub mod random;
pub(crate) mod spectral;

pub use field::{axpy, ScalarField, VectorField};
pub use grid::{Boundary, GridSpec, Scheme, MIN_ACTIVE_NODES};
pub use ops::{
    convection, cross, curl, divergence, gradient, inner_l2, inner_l2_vector,
    kinetic_energy_density, laplacian, norm_l2, norm_l2_vector, norm_linf, vector_laplacian,
};

pub(crate) use fd::neumann_laplacian;
