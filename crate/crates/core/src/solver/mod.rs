//! Projection-method time integration of the incompressible Navier-Stokes
//! equations and the kinetic-energy-density residual.

pub mod presets;
mod scenario;
mod step;
mod trajectory;

pub use scenario::{
    advective_courant, diffusion_number, project_initial, relative_divergence,
    solenoidal_tolerance, wall_sup, Forcing, Integrator, Scenario, CFL_LIMIT,
};
pub use step::{
    energy_equation_residual, energy_residual_norm, initial_state, pressure_from_velocity, run,
    run_with, step, synchronization_error, synchronized_states,
};
pub use trajectory::{load_states, FlowState, IndexEntry, Trajectory, TrajectoryIndex};
