use std::fs::File;
use std::io::{BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::io::{self as fio, FieldRecord};
use crate::fields::{GridSpec, ScalarField, VectorField};
use crate::solver::Scenario;

/// Velocity and pressure at one instant.
///
/// The projection step produces a pressure that approximates the continuous
/// one at an intermediate stage rather than at `time`; `pressure_time`
/// records that instant so time-centred diagnostics can interpolate.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub time: f64,
    pub velocity: VectorField,
    /// Mean-zero pressure.
    pub pressure: ScalarField,
    pub pressure_time: f64,
}

impl FlowState {
    /// A state whose pressure is sampled at the same instant as the velocity.
    pub fn new(time: f64, velocity: VectorField, pressure: ScalarField) -> Result<Self> {
        if velocity.grid() != pressure.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(FlowState {
            time,
            velocity,
            pressure,
            pressure_time: time,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.velocity.grid()
    }
}

/// Stored states of one run, in increasing time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    scenario: Scenario,
    states: Vec<FlowState>,
}

impl Trajectory {
    /// Wraps externally produced states (e.g. synthetic controls).
    pub fn from_states(scenario: Scenario, states: Vec<FlowState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::IndexOutOfRange { index: 0, len: 0 });
        }
        for s in &states {
            if s.grid() != scenario.grid() {
                return Err(Error::GridMismatch);
            }
        }
        if states.windows(2).any(|w| !(w[1].time > w[0].time)) {
            return Err(Error::validation(
                crate::error::Assumption::Parameters,
                "trajectory times must be strictly increasing",
            ));
        }
        Ok(Trajectory { scenario, states })
    }

    pub(crate) fn from_parts(scenario: Scenario, states: Vec<FlowState>) -> Self {
        Trajectory { scenario, states }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }
    pub fn states(&self) -> &[FlowState] {
        &self.states
    }
    pub fn len(&self) -> usize {
        self.states.len()
    }
    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
    pub fn get(&self, k: usize) -> Result<&FlowState> {
        self.states.get(k).ok_or(Error::IndexOutOfRange {
            index: k,
            len: self.states.len(),
        })
    }
    pub fn last(&self) -> &FlowState {
        self.states.last().expect("trajectory is never empty")
    }
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.time).collect()
    }

    /// Writes `trajectory.bin` (velocity then pressure record per state)
    /// and its `trajectory.json` index into `dir`.
    pub fn save(&self, dir: &Path) -> Result<TrajectoryIndex> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let bin = dir.join("trajectory.bin");
        let mut w = BufWriter::new(File::create(&bin).map_err(|e| Error::io(&bin, e))?);
        let grid = *self.scenario.grid();
        let vlen = fio::record_len(&grid, 3) as u64;
        let plen = fio::record_len(&grid, 1) as u64;
        let mut entries = Vec::with_capacity(self.states.len());
        let mut offset = 0u64;
        for s in &self.states {
            fio::write_vector(&mut w, &s.velocity).map_err(|e| Error::io(&bin, e))?;
            fio::write_scalar(&mut w, &s.pressure).map_err(|e| Error::io(&bin, e))?;
            entries.push(IndexEntry {
                time: s.time,
                pressure_time: s.pressure_time,
                velocity_offset: offset,
                pressure_offset: offset + vlen,
            });
            offset += vlen + plen;
        }
        w.flush().map_err(|e| Error::io(&bin, e))?;
        let index = TrajectoryIndex {
            scenario: self.scenario.name().to_string(),
            file: "trajectory.bin".into(),
            grid,
            states: entries,
        };
        let path = dir.join("trajectory.json");
        let text = serde_json::to_string_pretty(&index).expect("index serializes");
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub time: f64,
    pub pressure_time: f64,
    /// Byte offsets into the binary file.
    pub velocity_offset: u64,
    pub pressure_offset: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryIndex {
    pub scenario: String,
    pub file: String,
    pub grid: GridSpec,
    pub states: Vec<IndexEntry>,
}

/// Reads back the states written by [`Trajectory::save`].
pub fn load_states(dir: &Path) -> Result<Vec<FlowState>> {
    let path = dir.join("trajectory.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let index: TrajectoryIndex = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let bin = dir.join(&index.file);
    let mut r = BufReader::new(File::open(&bin).map_err(|e| Error::io(&bin, e))?);
    let mut read_at = |offset: u64| -> Result<FieldRecord> {
        r.seek(SeekFrom::Start(offset))
            .map_err(|e| Error::io(&bin, e))?;
        fio::read_record(&mut r)
    };
    index
        .states
        .iter()
        .map(|e| {
            let velocity = match read_at(e.velocity_offset)? {
                FieldRecord::Vector(v) => v,
                FieldRecord::Scalar(_) => {
                    return Err(Error::Format("expected a vector record".into()))
                }
            };
            let pressure = match read_at(e.pressure_offset)? {
                FieldRecord::Scalar(s) => s,
                FieldRecord::Vector(_) => {
                    return Err(Error::Format("expected a scalar record".into()))
                }
            };
            Ok(FlowState {
                time: e.time,
                velocity,
                pressure,
                pressure_time: e.pressure_time,
            })
        })
        .collect()
}
