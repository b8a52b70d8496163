//! Numerical verification harness for maximum-principle claims about the
//! incompressible Navier-Stokes equations.
//!
//! The crate simulates flows in a periodic or walled box, evaluates the
//! kinetic-energy-density identities, the Leray decomposition and a family
//! of a priori inequalities on the computed trajectories, and reports a
//! signed margin with a PASS/FLAG verdict for every claim.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod helmholtz;
pub mod poisson;
pub mod solver;

pub use error::{Error, Result};
