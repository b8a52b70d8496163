//! Twin-run check of the exponential bound on the difference of two
//! solutions with nearby initial data.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{AprioriConstants, ClaimRecord, Report};
use crate::error::Result;
use crate::fields::{ops, random};
use crate::solver::{self, project_initial, Scenario};

pub const TWIN_DIFFERENCE: &str = "twin_difference_bound";
/// Highest mode of the perturbation noise.
pub const NOISE_MODES: i64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub report: Report,
    /// Growth rate `3 A1² / (4μ)` with `A1` the larger of the two runs' constants.
    pub growth_rate: f64,
    /// `||V(0)||₂²`.
    pub initial_difference: f64,
}

/// Runs `scenario` and a copy whose initial data carries `delta` times a
/// seeded solenoidal noise field of unit sup norm (re-projected), then
/// compares `||V(t)||₂²` with `e^{A4 t} ||V(0)||₂²` at every stored step.
pub fn stability_report(scenario: &Scenario, delta: f64, seed: u64) -> Result<StabilityReport> {
    let grid = *scenario.grid();
    let twin_initial = if delta == 0.0 {
        scenario.initial().clone()
    } else {
        let noise = random::smooth_solenoidal(&grid, seed, NOISE_MODES, 1.0);
        project_initial(&(scenario.initial() + &(&noise * delta)))?
    };
    let twin = Scenario::new(
        format!("{}-twin", scenario.name()),
        twin_initial,
        scenario.viscosity(),
        scenario.horizon(),
        scenario.dt(),
    )?
    .with_forcing(scenario.forcing().clone())?
    .with_integrator(scenario.integrator());

    let (a, b) = rayon::join(|| solver::run(scenario), || solver::run(&twin));
    let (a, b) = (a?, b?);
    let a1 = AprioriConstants::from_scenario(scenario)
        .a1
        .max(AprioriConstants::from_scenario(&twin).a1);
    let growth_rate = 3.0 * a1 * a1 / (4.0 * scenario.viscosity());

    let mut report = Report::new("stability");
    let diff = |k: usize| {
        ops::norm_l2_vector(&(&a.states()[k].velocity - &b.states()[k].velocity)).powi(2)
    };
    let v0 = diff(0);
    for (k, s) in a.states().iter().enumerate() {
        let rhs = (growth_rate * s.time).exp() * v0;
        report.push(ClaimRecord::new(
            TWIN_DIFFERENCE,
            s.time,
            diff(k),
            rhs,
            1e-9 * rhs,
        ));
    }
    Ok(StabilityReport {
        report,
        growth_rate,
        initial_difference: v0,
    })
}
