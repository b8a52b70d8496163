//! TOML scenario files and the built-in preset registry.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{io, random, Boundary, GridSpec, Scheme, VectorField};
use crate::solver::{presets, project_initial, Forcing, Integrator, Scenario};

/// Initial velocity, named from a fixed family of analytic or seeded fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialField {
    /// `(sin x cos y, -cos x sin y, 0)`.
    TaylorGreen,
    /// `(cos y, sin x, 0)`.
    Separable,
    /// `(sin z, 2 cos z, 0)`.
    Shear,
    Rest,
    /// Seeded smooth solenoidal field with largest component `amplitude`.
    Random {
        seed: u64,
        modes: i64,
        amplitude: f64,
    },
    /// Seeded smooth field with no divergence constraint; needs auto-projection.
    Compressive {
        seed: u64,
        modes: i64,
        amplitude: f64,
    },
    /// Single cell vortex vanishing on the walls of a box.
    BoxVortex {
        amplitude: f64,
    },
    /// Vector record in the binary field format.
    File {
        path: PathBuf,
    },
}

/// Seeded solenoidal perturbation added to the initial field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Noise {
    pub amplitude: f64,
    pub seed: u64,
    #[serde(default = "default_modes")]
    pub modes: i64,
}

fn default_modes() -> i64 {
    3
}

/// Everything needed to rebuild a [`Scenario`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub viscosity: f64,
    pub horizon: f64,
    pub dt: f64,
    #[serde(default)]
    pub integrator: Integrator,
    pub grid: GridSpec,
    pub initial: InitialField,
    #[serde(default, skip_serializing_if = "Forcing::is_zero")]
    pub forcing: Forcing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<Noise>,
}

impl ScenarioConfig {
    /// The seed that governs every random ingredient: `over` if given,
    /// otherwise the initial field's, then the noise's, then zero.
    pub fn effective_seed(&self, over: Option<u64>) -> u64 {
        over.or(match self.initial {
            InitialField::Random { seed, .. } | InitialField::Compressive { seed, .. } => {
                Some(seed)
            }
            _ => None,
        })
        .or(self.noise.map(|n| n.seed))
        .unwrap_or(0)
    }

    /// Replaces every seed in the config with `seed`.
    pub fn reseeded(mut self, seed: u64) -> Self {
        if let InitialField::Random { seed: s, .. } | InitialField::Compressive { seed: s, .. } =
            &mut self.initial
        {
            *s = seed;
        }
        if let Some(n) = &mut self.noise {
            n.seed = seed;
        }
        self
    }

    /// Sets the node count of every active direction to `n`.
    pub fn with_resolution(mut self, n: usize) -> Self {
        let g = &mut self.grid;
        for d in [&mut g.nx, &mut g.ny, &mut g.nz] {
            if *d > 1 {
                *d = n;
            }
        }
        self
    }

    pub fn initial_velocity(&self) -> Result<VectorField> {
        let grid = self.grid;
        grid.validate()?;
        let mut u = match &self.initial {
            InitialField::TaylorGreen => presets::taylor_green_velocity(&grid, self.viscosity, 0.0),
            InitialField::Separable => presets::separable_velocity(&grid),
            InitialField::Shear => presets::shear_velocity(&grid),
            InitialField::Rest => VectorField::zeros(grid),
            InitialField::Random {
                seed,
                modes,
                amplitude,
            } => random::smooth_solenoidal(&grid, *seed, *modes, *amplitude),
            InitialField::Compressive {
                seed,
                modes,
                amplitude,
            } => {
                let v = random::smooth_vector(&grid, *seed, *modes);
                let m = v.max_abs();
                if m > 0.0 {
                    &v * (*amplitude / m)
                } else {
                    v
                }
            }
            InitialField::BoxVortex { amplitude } => {
                presets::box_vortex_velocity(&grid, *amplitude)
            }
            InitialField::File { path } => match io::load_record(path)? {
                io::FieldRecord::Vector(v) if *v.grid() == grid => v,
                io::FieldRecord::Vector(_) => return Err(Error::GridMismatch),
                io::FieldRecord::Scalar(_) => {
                    return Err(Error::Format(format!(
                        "{}: expected a vector record",
                        path.display()
                    )))
                }
            },
        };
        if let Some(n) = self.noise {
            u = &u + &random::smooth_solenoidal(&grid, n.seed, n.modes, n.amplitude);
        }
        Ok(u)
    }

    /// Builds and validates the scenario, projecting the initial field onto
    /// solenoidal fields first when `auto_project` is set.
    pub fn build(&self, auto_project: bool) -> Result<Scenario> {
        let mut u = self.initial_velocity()?;
        if auto_project {
            u = project_initial(&u)?;
        }
        Ok(
            Scenario::new(self.name.clone(), u, self.viscosity, self.horizon, self.dt)?
                .with_forcing(self.forcing.clone())?
                .with_integrator(self.integrator),
        )
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    pub fn from_toml(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })
    }
}

pub struct PresetInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "taylor-green-2d",
        summary: "decaying Taylor-Green vortex, 64², μ = 0.01, T = 1, dt = 1e-3",
    },
    PresetInfo {
        name: "shear-counterexample",
        summary: "(sin z, 2cos z, 0) on a 256-node column, single state",
    },
    PresetInfo {
        name: "separable",
        summary: "(cos y, sin x, 0) on 32², μ = 0.01, T = 1",
    },
    PresetInfo {
        name: "rest",
        summary: "zero velocity, no forcing",
    },
    PresetInfo {
        name: "random",
        summary: "seeded smooth solenoidal field on 32², μ = 0.1, T = 0.5",
    },
    PresetInfo {
        name: "compressive",
        summary: "seeded field with divergence; run with --auto-project",
    },
    PresetInfo {
        name: "box-vortex",
        summary: "cell vortex in a no-slip unit box, 16³ finite differences",
    },
    PresetInfo {
        name: "kolmogorov",
        summary: "fluid at rest driven by a sinusoidal shear force",
    },
];

fn periodic_plane(n: usize) -> GridSpec {
    GridSpec {
        nx: n,
        ny: n,
        nz: 1,
        lx: 2.0 * PI,
        ly: 2.0 * PI,
        lz: 1.0,
        bc: Boundary::Periodic,
        scheme: Scheme::Spectral,
    }
}

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    let cfg = |viscosity, horizon, dt, grid, initial| ScenarioConfig {
        name: name.to_string(),
        viscosity,
        horizon,
        dt,
        integrator: Integrator::Rk2,
        grid,
        initial,
        forcing: Forcing::None,
        noise: None,
    };
    let seeded = |seed| (seed, 3, 1.0);
    Some(match name {
        "taylor-green-2d" => cfg(
            0.01,
            1.0,
            1e-3,
            periodic_plane(64),
            InitialField::TaylorGreen,
        ),
        "shear-counterexample" => cfg(
            0.01,
            0.0,
            1e-3,
            GridSpec {
                nx: 1,
                ny: 1,
                nz: 256,
                lx: 2.0 * PI,
                ly: 2.0 * PI,
                lz: 2.0 * PI,
                ..periodic_plane(1)
            },
            InitialField::Shear,
        ),
        "separable" => cfg(0.01, 1.0, 0.01, periodic_plane(32), InitialField::Separable),
        "rest" => cfg(0.1, 1.0, 0.1, periodic_plane(16), InitialField::Rest),
        "random" => {
            let (seed, modes, amplitude) = seeded(1);
            cfg(
                0.1,
                0.5,
                0.01,
                periodic_plane(32),
                InitialField::Random {
                    seed,
                    modes,
                    amplitude,
                },
            )
        }
        "compressive" => {
            let (seed, modes, amplitude) = seeded(1);
            cfg(
                0.1,
                0.5,
                0.01,
                periodic_plane(32),
                InitialField::Compressive {
                    seed,
                    modes,
                    amplitude,
                },
            )
        }
        "box-vortex" => cfg(
            0.05,
            0.2,
            0.005,
            GridSpec {
                nx: 16,
                ny: 16,
                nz: 16,
                lx: 1.0,
                ly: 1.0,
                lz: 1.0,
                bc: Boundary::NoSlipBox,
                scheme: Scheme::FiniteDifference,
            },
            InitialField::BoxVortex { amplitude: 1.0 },
        ),
        "kolmogorov" => ScenarioConfig {
            forcing: Forcing::Kolmogorov {
                amplitude: 1.0,
                mode: 1,
            },
            ..cfg(0.1, 1.0, 0.01, periodic_plane(32), InitialField::Rest)
        },
        _ => return None,
    })
}

/// Reads a scenario file, or falls back to a preset of that name.
pub fn load_config(source: &Path) -> Result<ScenarioConfig> {
    if source.is_file() {
        let text = std::fs::read_to_string(source).map_err(|e| Error::io(source, e))?;
        return ScenarioConfig::from_toml(&text, &source.display().to_string());
    }
    let name = source.to_string_lossy();
    preset(&name).ok_or_else(|| Error::Parse {
        path: name.to_string(),
        message: "neither a scenario file nor a built-in preset".into(),
    })
}

/// Loads, seeds and validates a scenario from a file or preset name.
pub fn parse_scenario(source: &Path, auto_project: bool, seed: Option<u64>) -> Result<Scenario> {
    let mut cfg = load_config(source)?;
    if let Some(s) = seed {
        cfg = cfg.reseeded(s);
    }
    cfg.build(auto_project)
}
