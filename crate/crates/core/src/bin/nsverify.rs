use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nsverify::cli::{self, Check, Format, OutputOptions, RunConfig};

/// Simulate incompressible flows and check maximum-principle and a priori
/// claims against them. FLAG verdicts are findings; the exit status is
/// nonzero only when something failed to run.
#[derive(Parser)]
#[command(name = "nsverify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Check to evaluate (repeatable or comma separated).
    #[arg(long = "check", value_delimiter = ',')]
    checks: Vec<Check>,
    /// Every check.
    #[arg(long, conflicts_with = "checks")]
    all: bool,
    /// Output directory.
    #[arg(long, default_value = "nsverify-out")]
    out: PathBuf,
    /// Report formats.
    #[arg(long = "format", value_delimiter = ',', default_values = ["json", "csv"])]
    formats: Vec<Format>,
    /// Store every n-th state.
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Amplitude of the stability perturbation.
    #[arg(long, default_value_t = cli::run::DEFAULT_DELTA)]
    delta: f64,
}

impl Output {
    fn options(self) -> OutputOptions {
        OutputOptions {
            checks: if self.all {
                Check::ALL.to_vec()
            } else {
                self.checks
            },
            out: self.out,
            formats: self.formats,
            stride: self.stride,
            delta: self.delta,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and evaluate the selected checks.
    Run {
        /// Scenario TOML file or preset name.
        scenario: PathBuf,
        #[command(flatten)]
        output: Output,
        /// Seed for every random ingredient (overrides the file).
        #[arg(long)]
        seed: Option<u64>,
        /// Project the initial field onto solenoidal fields before validating.
        #[arg(long)]
        auto_project: bool,
    },
    /// Run a parameter sweep described by a TOML file.
    Sweep {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        auto_project: bool,
    },
    /// Single-state checks on a velocity field file.
    Analyze {
        field: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// List built-in scenarios, or print one as TOML.
    Presets {
        /// Preset to print.
        name: Option<String>,
    },
}

/// Returns whether everything ran; FLAGs count as running.
fn execute(cli: Cli) -> nsverify::Result<bool> {
    match cli.command {
        Command::Run {
            scenario,
            output,
            seed,
            auto_project,
        } => {
            let s = cli::run_command(&RunConfig {
                scenario,
                output: output.options(),
                seed,
                auto_project,
            })?;
            println!("{} ({} steps, seed {})", s.scenario, s.steps, s.seed);
            for (name, c) in &s.checks {
                println!("  {name:<18} {:>7} PASS {:>7} FLAG", c.pass, c.flag);
            }
        }
        Command::Sweep {
            file,
            output,
            auto_project,
        } => {
            let (base, grid) = cli::load_sweep(&file)?;
            let s = cli::sweep_command(&base, &grid, &output.options(), auto_project)?;
            for r in &s.rows {
                match &r.error {
                    None => println!("cell {:>3}: {} PASS {} FLAG", r.cell.index, r.pass, r.flag),
                    Some(e) => println!("cell {:>3}: error: {e}", r.cell.index),
                }
            }
            if s.failed() > 0 {
                eprintln!("{} of {} cells failed", s.failed(), s.rows.len());
                return Ok(false);
            }
        }
        Command::Analyze { field, output } => {
            let mut opts = output.options();
            if opts.checks.is_empty() {
                opts.checks = Check::ALL
                    .into_iter()
                    .filter(|c| c.is_pointwise())
                    .collect();
            }
            let s = cli::analyze_command(&field, &opts)?;
            println!("{} energy maxima", s.energy_maxima);
            for (name, c) in &s.checks {
                println!("  {name:<18} {:>7} PASS {:>7} FLAG", c.pass, c.flag);
            }
        }
        Command::Presets { name: Some(name) } => match cli::preset(&name) {
            Some(cfg) => print!("{}", cfg.to_toml()),
            None => {
                return Err(nsverify::Error::Parse {
                    path: name,
                    message: "no such preset".into(),
                });
            }
        },
        Command::Presets { name: None } => {
            for p in cli::PRESETS {
                println!("{:<22} {}", p.name, p.summary);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            // Messages already embed their causes.
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
