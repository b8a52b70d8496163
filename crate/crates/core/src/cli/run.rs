//! Single-scenario runs and single-state analysis.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::config::{load_config, ScenarioConfig};
use crate::diagnostics::{
    apriori::APRIORI_TOL, apriori_report, extremum_coincidence,
    identities::discretization_tolerance, identities::identity_report_with, interior_maxima,
    max_principle_report, stability_report, AprioriConstants, Counts, Report,
};
use crate::error::{Error, Result};
use crate::fields::{io, ops};
use crate::solver::{self, pressure_from_velocity, FlowState, Scenario, Trajectory};

/// Relative tolerance of the maximum-principle monitors.
pub const MAX_PRINCIPLE_TOL: f64 = 1e-8;
/// Default amplitude of the stability perturbation.
pub const DEFAULT_DELTA: f64 = 1e-6;

#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Check {
    MaxPrinciple,
    Coincidence,
    PressureIdentity,
    Apriori,
    Stability,
    EnergyResidual,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::MaxPrinciple,
        Check::Coincidence,
        Check::PressureIdentity,
        Check::Apriori,
        Check::Stability,
        Check::EnergyResidual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::MaxPrinciple => "max_principle",
            Check::Coincidence => "coincidence",
            Check::PressureIdentity => "pressure_identity",
            Check::Apriori => "apriori",
            Check::Stability => "stability",
            Check::EnergyResidual => "energy_residual",
        }
    }

    /// Checks that need only one state.
    pub fn is_pointwise(self) -> bool {
        matches!(self, Check::Coincidence | Check::PressureIdentity)
    }
}

#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Output options shared by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputOptions {
    pub checks: Vec<Check>,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    /// Keep every `stride`-th state of the trajectory.
    pub stride: usize,
    /// Perturbation amplitude of the stability twin run.
    pub delta: f64,
}

impl OutputOptions {
    pub fn new(out: impl Into<PathBuf>, checks: Vec<Check>) -> Self {
        OutputOptions {
            checks,
            out: out.into(),
            formats: vec![Format::Json, Format::Csv],
            stride: 1,
            delta: DEFAULT_DELTA,
        }
    }

    fn normalized_checks(&self) -> Vec<Check> {
        let mut c = self.checks.clone();
        c.sort();
        c.dedup();
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Scenario file or preset name.
    pub scenario: PathBuf,
    pub output: OutputOptions,
    pub seed: Option<u64>,
    pub auto_project: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CheckSummary {
    pub pass: usize,
    pub flag: usize,
    pub claims: BTreeMap<String, Counts>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: u64,
    pub viscosity: f64,
    pub horizon: f64,
    pub dt: f64,
    pub dims: [usize; 3],
    pub steps: usize,
    pub stored_states: usize,
    pub checks: BTreeMap<String, CheckSummary>,
}

impl RunSummary {
    pub fn total(&self) -> Counts {
        self.checks.values().fold(Counts::default(), |a, c| Counts {
            pass: a.pass + c.pass,
            flag: a.flag + c.flag,
        })
    }

    /// Counts of one claim across all checks.
    pub fn claim(&self, id: &str) -> Counts {
        self.checks
            .values()
            .filter_map(|c| c.claims.get(id))
            .fold(Counts::default(), |a, c| Counts {
                pass: a.pass + c.pass,
                flag: a.flag + c.flag,
            })
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn with_context(scenario: &str, time: f64, e: Error) -> Error {
    match e {
        e @ Error::Scenario { .. } => e,
        e => Error::Scenario {
            scenario: scenario.to_string(),
            time,
            source: Box::new(e),
        },
    }
}

/// Writes `report` in every requested format and summarizes it.
fn emit(report: &Report, out: &OutputOptions, seed: u64) -> Result<CheckSummary> {
    let mut files = Vec::new();
    for f in &out.formats {
        let name = match f {
            Format::Json => {
                let name = format!("{}.json", report.check);
                report.save_json(&out.out.join(&name), Some(seed))?;
                name
            }
            Format::Csv => {
                let name = format!("{}.csv", report.check);
                report.save_csv(&out.out.join(&name))?;
                if !report.observations.is_empty() {
                    let obs = format!("{}_observations.csv", report.check);
                    report.save_observations_csv(&out.out.join(&obs))?;
                    files.push(obs);
                }
                name
            }
        };
        files.push(name);
    }
    files.sort();
    let c = report.counts();
    Ok(CheckSummary {
        pass: c.pass,
        flag: c.flag,
        claims: report.counts_by_claim().into_iter().collect(),
        files,
    })
}

fn coincidence_over(states: &[FlowState]) -> Report {
    let parts: Vec<Report> = states
        .par_iter()
        .map(|s| {
            extremum_coincidence(
                s,
                &interior_maxima(&ops::kinetic_energy_density(&s.velocity)),
            )
            .report
        })
        .collect();
    merge("coincidence", parts)
}

/// Identity claims per state, with tolerances from the state's resolution
/// and, for the pressure, from the time synchronization error.
fn identities_over(name: &str, states: &[FlowState], sync_error: &[f64]) -> Result<Report> {
    let parts = states
        .par_iter()
        .zip(sync_error)
        .map(|(s, &sync)| {
            let tol = discretization_tolerance(&s.velocity);
            identity_report_with(s, tol, tol + sync).map_err(|e| with_context(name, s.time, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge("pressure_identity", parts))
}

fn merge(check: &str, parts: Vec<Report>) -> Report {
    let mut rep = Report::new(check);
    for p in parts {
        rep.extend(p);
    }
    rep
}

/// Pointwise energy-equation residual per stored interval, plus its `L₂(Q)` norm.
fn energy_residual_over(traj: &Trajectory) -> Result<Report> {
    let name = traj.scenario().name();
    let mut rep = Report::new("energy_residual");
    let states = traj.states();
    let norms = (0..states.len().saturating_sub(1))
        .into_par_iter()
        .map(|k| {
            solver::energy_equation_residual(traj, k)
                .map(|r| ops::norm_l2(&r))
                .map_err(|e| with_context(name, states[k].time, e))
        })
        .collect::<Result<Vec<_>>>()?;
    for (k, n) in norms.into_iter().enumerate() {
        rep.observe(
            "energy_equation_residual",
            0.5 * (states[k].time + states[k + 1].time),
            Some(n),
            None,
        );
    }
    let total =
        solver::energy_residual_norm(traj).map_err(|e| with_context(name, traj.last().time, e))?;
    rep.observe(
        "energy_equation_residual_l2q",
        traj.last().time,
        Some(total),
        None,
    );
    Ok(rep)
}

/// Evaluates one check on a computed trajectory. `delta` and `seed` only
/// affect the stability twin.
pub fn evaluate_check(traj: &Trajectory, check: Check, delta: f64, seed: u64) -> Result<Report> {
    let scenario = traj.scenario();
    // Pressure-based checks compare velocity and pressure at the same instant.
    Ok(match check {
        Check::MaxPrinciple => max_principle_report(traj, MAX_PRINCIPLE_TOL),
        Check::Coincidence => coincidence_over(&solver::synchronized_states(traj)),
        Check::PressureIdentity => identities_over(
            scenario.name(),
            &solver::synchronized_states(traj),
            &solver::synchronization_error(traj),
        )?,
        Check::Apriori => apriori_report(
            traj,
            &AprioriConstants::from_scenario(scenario),
            APRIORI_TOL,
        ),
        Check::Stability => stability_report(scenario, delta, seed)?.report,
        Check::EnergyResidual => energy_residual_over(traj)?,
    })
}

/// Integrates `scenario`, writes the trajectory and one report per check
/// under `out.out`, and returns (and writes) the summary.
pub fn run_scenario(scenario: &Scenario, out: &OutputOptions, seed: u64) -> Result<RunSummary> {
    if out.stride == 0 {
        return Err(Error::Parse {
            path: "--stride".into(),
            message: "stride must be at least 1".into(),
        });
    }
    create_dir(&out.out)?;
    let traj = solver::run_with(scenario, out.stride, |_, _| {})?;
    traj.save(&out.out.join("trajectory"))?;

    let mut checks = BTreeMap::new();
    for check in out.normalized_checks() {
        let report = evaluate_check(&traj, check, out.delta, seed)?;
        checks.insert(check.name().to_string(), emit(&report, out, seed)?);
    }

    let summary = RunSummary {
        scenario: scenario.name().to_string(),
        seed,
        viscosity: scenario.viscosity(),
        horizon: scenario.horizon(),
        dt: scenario.dt(),
        dims: scenario.grid().dims(),
        steps: scenario.steps(),
        stored_states: traj.len(),
        checks,
    };
    write_json(&out.out.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Loads the scenario named by `config` and runs it.
pub fn run_command(config: &RunConfig) -> Result<RunSummary> {
    let cfg = load_config(&config.scenario)?;
    run_config(&cfg, config.seed, config.auto_project, &config.output)
}

pub(crate) fn run_config(
    cfg: &ScenarioConfig,
    seed: Option<u64>,
    auto_project: bool,
    out: &OutputOptions,
) -> Result<RunSummary> {
    let seed_used = cfg.effective_seed(seed);
    let cfg = match seed {
        Some(s) => cfg.clone().reseeded(s),
        None => cfg.clone(),
    };
    let scenario = cfg.build(auto_project)?;
    run_scenario(&scenario, out, seed_used)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeSummary {
    pub field: String,
    pub dims: [usize; 3],
    pub energy_maxima: usize,
    pub checks: BTreeMap<String, CheckSummary>,
}

/// Runs the single-state checks on the velocity stored in `field`, with the
/// pressure recovered from the velocity.
pub fn analyze_command(field: &Path, out: &OutputOptions) -> Result<AnalyzeSummary> {
    let u = match io::load_record(field)? {
        io::FieldRecord::Vector(v) => v,
        io::FieldRecord::Scalar(_) => {
            return Err(Error::Format(format!(
                "{}: expected a vector record",
                field.display()
            )))
        }
    };
    let checks = out.normalized_checks();
    if let Some(c) = checks.iter().find(|c| !c.is_pointwise()) {
        return Err(Error::Parse {
            path: "--check".into(),
            message: format!("{} needs a trajectory; use `run`", c.name()),
        });
    }
    create_dir(&out.out)?;
    let name = field.display().to_string();
    let p = pressure_from_velocity(&u).map_err(|e| with_context(&name, 0.0, e))?;
    let state = FlowState::new(0.0, u, p)?;
    let sites = interior_maxima(&ops::kinetic_energy_density(&state.velocity));

    let mut summaries = BTreeMap::new();
    for check in checks {
        let report = match check {
            Check::Coincidence => extremum_coincidence(&state, &sites).report,
            Check::PressureIdentity => {
                identities_over(&name, std::slice::from_ref(&state), &[0.0])?
            }
            _ => unreachable!("filtered above"),
        };
        summaries.insert(check.name().to_string(), emit(&report, out, 0)?);
    }
    let summary = AnalyzeSummary {
        field: name,
        dims: state.grid().dims(),
        energy_maxima: sites.len(),
        checks: summaries,
    };
    write_json(&out.out.join("summary.json"), &summary)?;
    Ok(summary)
}
