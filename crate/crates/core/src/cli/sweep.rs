//! Parameter sweeps: one independent run per cell of a Cartesian grid over
//! viscosity, resolution, time step and seed.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::config::{load_config, preset, ScenarioConfig};
use crate::cli::run::{run_config, OutputOptions, RunSummary};
use crate::error::{Error, Result};

/// Values to sweep; an empty list keeps the base scenario's value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub viscosity: Vec<f64>,
    pub resolution: Vec<usize>,
    pub dt: Vec<f64>,
    pub seed: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum BaseSpec {
    Preset(String),
    Inline(Box<ScenarioConfig>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    base: BaseSpec,
    #[serde(default)]
    sweep: SweepGrid,
}

/// Reads a sweep file: `base` is a preset name or an inline scenario table,
/// `[sweep]` lists the values per parameter.
pub fn load_sweep(path: &Path) -> Result<(ScenarioConfig, SweepGrid)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let origin = path.display().to_string();
    let file: SweepFile = toml::from_str(&text).map_err(|e| Error::Parse {
        path: origin.clone(),
        message: e.to_string(),
    })?;
    let base = match file.base {
        BaseSpec::Inline(c) => *c,
        BaseSpec::Preset(name) => match preset(&name) {
            Some(c) => c,
            None => load_config(&path.parent().unwrap_or(Path::new(".")).join(&name))?,
        },
    };
    Ok((base, file.sweep))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub viscosity: f64,
    pub resolution: Option<usize>,
    pub dt: f64,
    pub seed: Option<u64>,
}

impl SweepGrid {
    /// Cells in row-major order: viscosity slowest, seed fastest.
    pub fn cells(&self, base: &ScenarioConfig) -> Vec<Cell> {
        fn or<T: Copy>(v: &[T], d: T) -> Vec<T> {
            if v.is_empty() {
                vec![d]
            } else {
                v.to_vec()
            }
        }
        let mut out = Vec::new();
        for &viscosity in &or(&self.viscosity, base.viscosity) {
            for &resolution in &or(
                &self.resolution.iter().map(|&n| Some(n)).collect::<Vec<_>>(),
                None,
            ) {
                for &dt in &or(&self.dt, base.dt) {
                    for &seed in &or(
                        &self.seed.iter().map(|&s| Some(s)).collect::<Vec<_>>(),
                        None,
                    ) {
                        out.push(Cell {
                            index: out.len(),
                            viscosity,
                            resolution,
                            dt,
                            seed,
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cell: Cell,
    pub seed: u64,
    pub status: String,
    pub pass: usize,
    pub flag: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub scenario: String,
    pub rows: Vec<SweepRow>,
    #[serde(skip)]
    pub runs: Vec<Option<RunSummary>>,
}

impl SweepSummary {
    pub fn failed(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

fn cell_config(base: &ScenarioConfig, cell: &Cell) -> ScenarioConfig {
    let mut cfg = base.clone();
    cfg.viscosity = cell.viscosity;
    cfg.dt = cell.dt;
    if let Some(n) = cell.resolution {
        cfg = cfg.with_resolution(n);
    }
    cfg.name = format!("{}#{}", base.name, cell.index);
    cfg
}

/// Runs every cell concurrently into `out/cell-NNN`, then writes
/// `sweep.csv` and `sweep.json` with one row per cell in cell order.
/// Failing cells become error rows; the sweep itself only fails on I/O.
pub fn sweep_command(
    base: &ScenarioConfig,
    grid: &SweepGrid,
    out: &OutputOptions,
    auto_project: bool,
) -> Result<SweepSummary> {
    std::fs::create_dir_all(&out.out).map_err(|e| Error::io(&out.out, e))?;
    let cells = grid.cells(base);
    let results: Vec<(SweepRow, Option<RunSummary>)> = cells
        .par_iter()
        .map(|cell| {
            let cfg = cell_config(base, cell);
            let seed = cfg.effective_seed(cell.seed);
            let cell_out = OutputOptions {
                out: out.out.join(format!("cell-{:03}", cell.index)),
                ..out.clone()
            };
            match run_config(&cfg, cell.seed, auto_project, &cell_out) {
                Ok(s) => {
                    let c = s.total();
                    let row = SweepRow {
                        cell: *cell,
                        seed,
                        status: "ok".into(),
                        pass: c.pass,
                        flag: c.flag,
                        error: None,
                    };
                    (row, Some(s))
                }
                Err(e) => {
                    let row = SweepRow {
                        cell: *cell,
                        seed,
                        status: "error".into(),
                        pass: 0,
                        flag: 0,
                        error: Some(e.to_string()),
                    };
                    (row, None)
                }
            }
        })
        .collect();
    let (rows, runs): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let summary = SweepSummary {
        scenario: base.name.clone(),
        rows,
        runs,
    };

    let csv_path = out.out.join("sweep.csv");
    let f = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    write_rows(std::io::BufWriter::new(f), &summary.rows)?;
    let json_path = out.out.join("sweep.json");
    let text = serde_json::to_string_pretty(&summary).expect("sweep summary serializes");
    std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok(summary)
}

fn write_rows<W: std::io::Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let fmt = |e: csv::Error| Error::Format(e.to_string());
    out.write_record([
        "cell",
        "viscosity",
        "resolution",
        "dt",
        "seed",
        "status",
        "pass",
        "flag",
        "error",
    ])
    .map_err(fmt)?;
    for r in rows {
        out.write_record([
            r.cell.index.to_string(),
            r.cell.viscosity.to_string(),
            r.cell.resolution.map(|n| n.to_string()).unwrap_or_default(),
            r.cell.dt.to_string(),
            r.seed.to_string(),
            r.status.clone(),
            r.pass.to_string(),
            r.flag.to_string(),
            r.error.clone().unwrap_or_default(),
        ])
        .map_err(fmt)?;
    }
    out.flush().map_err(|e| Error::Format(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::run::Check;

    #[test]
    fn empty_grid_is_one_cell_with_base_values() {
        let base = preset("random").unwrap();
        let cells = SweepGrid::default().cells(&base);
        assert_eq!(cells.len(), 1);
        assert_eq!(
            (cells[0].viscosity, cells[0].dt, cells[0].resolution),
            (0.1, 0.01, None)
        );
    }

    #[test]
    fn cell_order_is_row_major() {
        let base = preset("random").unwrap();
        let g = SweepGrid {
            viscosity: vec![0.01, 0.1],
            seed: vec![1, 2],
            ..Default::default()
        };
        let cells = g.cells(&base);
        let v: Vec<(f64, Option<u64>)> = cells.iter().map(|c| (c.viscosity, c.seed)).collect();
        assert_eq!(
            v,
            [
                (0.01, Some(1)),
                (0.01, Some(2)),
                (0.1, Some(1)),
                (0.1, Some(2))
            ]
        );
        assert!(cells.iter().enumerate().all(|(i, c)| c.index == i));
    }

    #[test]
    fn failing_cell_becomes_an_error_row() {
        let dir = tempfile::tempdir().unwrap();
        let mut base = preset("random").unwrap();
        base.horizon = 0.2;
        let g = SweepGrid {
            dt: vec![0.01, 0.2],
            seed: vec![1, 2],
            ..Default::default()
        };
        // dt = 0.2 violates the diffusive limit on 32² at μ = 0.1.
        let out = OutputOptions::new(dir.path(), vec![Check::Apriori]);
        let s = sweep_command(&base, &g, &out, false).unwrap();
        assert_eq!(s.rows.len(), 4);
        assert_eq!(s.failed(), 2);
        assert!(s.rows[2].error.as_ref().unwrap().contains("time step"));
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn sweep_file_accepts_preset_or_inline_base() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.toml");
        std::fs::write(
            &p,
            "base = \"random\"\n[sweep]\nviscosity = [0.01, 0.1]\nseed = [1, 2]\n",
        )
        .unwrap();
        let (base, g) = load_sweep(&p).unwrap();
        assert_eq!(base, preset("random").unwrap());
        assert_eq!(g.cells(&base).len(), 4);

        let file = SweepFile {
            base: BaseSpec::Inline(Box::new(preset("rest").unwrap())),
            sweep: SweepGrid {
                resolution: vec![16],
                ..Default::default()
            },
        };
        std::fs::write(&p, toml::to_string(&file).unwrap()).unwrap();
        let (base, g) = load_sweep(&p).unwrap();
        assert_eq!(base, preset("rest").unwrap());
        assert_eq!(g.resolution, [16]);
    }
}
