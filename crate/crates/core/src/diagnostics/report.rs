use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Flag,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Flag => "FLAG",
        })
    }
}

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimRecord {
    pub claim: String,
    pub time: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`; negative means the inequality is violated.
    pub margin: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
    /// Where the extremum behind the record sits, when meaningful.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<[f64; 3]>,
}

impl ClaimRecord {
    pub fn new(claim: impl Into<String>, time: f64, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        // NaN margins are findings too.
        let verdict = if margin >= -tolerance {
            Verdict::Pass
        } else {
            Verdict::Flag
        };
        ClaimRecord {
            claim: claim.into(),
            time,
            lhs,
            rhs,
            margin,
            verdict,
            tolerance,
            location: None,
        }
    }

    pub fn at(mut self, location: [f64; 3]) -> Self {
        self.location = Some(location);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// A measured quantity reported without a verdict (e.g. a fitted constant,
/// or a ratio that is undefined at a point).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub name: String,
    pub time: f64,
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<[f64; 3]>,
}

/// Append-only log of claim records for one check.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub records: Vec<ClaimRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observations: Vec<Observation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub flag: usize,
}

impl Report {
    pub fn new(check: impl Into<String>) -> Self {
        Report {
            check: check.into(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, record: ClaimRecord) {
        self.records.push(record);
    }

    pub fn observe(
        &mut self,
        name: impl Into<String>,
        time: f64,
        value: Option<f64>,
        location: Option<[f64; 3]>,
    ) {
        self.observations.push(Observation {
            name: name.into(),
            time,
            value,
            location,
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
        self.observations.extend(other.observations);
    }

    pub fn claim<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a ClaimRecord> + 'a {
        self.records.iter().filter(move |r| r.claim == id)
    }

    pub fn flags(&self) -> impl Iterator<Item = &ClaimRecord> {
        self.records.iter().filter(|r| !r.passed())
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(ClaimRecord::passed)
    }

    pub fn counts(&self) -> Counts {
        let flag = self.flags().count();
        Counts {
            pass: self.records.len() - flag,
            flag,
        }
    }

    /// Per-claim counts in first-appearance order.
    pub fn counts_by_claim(&self) -> Vec<(String, Counts)> {
        let mut out: Vec<(String, Counts)> = Vec::new();
        for r in &self.records {
            let pos = match out.iter().position(|(c, _)| *c == r.claim) {
                Some(p) => p,
                None => {
                    out.push((r.claim.clone(), Counts::default()));
                    out.len() - 1
                }
            };
            match r.verdict {
                Verdict::Pass => out[pos].1.pass += 1,
                Verdict::Flag => out[pos].1.flag += 1,
            }
        }
        out
    }

    pub fn to_json(&self, seed: Option<u64>) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            #[serde(flatten)]
            report: &'a Report,
            seed: Option<u64>,
        }
        serde_json::to_string_pretty(&Doc { report: self, seed }).expect("report serializes")
    }

    /// One row per record: `claim,time,lhs,rhs,margin,verdict,tolerance,x,y,z`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let fmt = |e: csv::Error| Error::Format(e.to_string());
        out.write_record([
            "claim",
            "time",
            "lhs",
            "rhs",
            "margin",
            "verdict",
            "tolerance",
            "x",
            "y",
            "z",
        ])
        .map_err(fmt)?;
        for r in &self.records {
            let loc: [String; 3] = match r.location {
                Some(l) => l.map(|v| v.to_string()),
                None => Default::default(),
            };
            out.write_record([
                r.claim.clone(),
                r.time.to_string(),
                r.lhs.to_string(),
                r.rhs.to_string(),
                r.margin.to_string(),
                r.verdict.to_string(),
                r.tolerance.to_string(),
                loc[0].clone(),
                loc[1].clone(),
                loc[2].clone(),
            ])
            .map_err(fmt)?;
        }
        out.flush().map_err(|e| Error::Format(e.to_string()))
    }

    /// One row per observation: `name,time,value,x,y,z`; undefined values are empty.
    pub fn write_observations_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let fmt = |e: csv::Error| Error::Format(e.to_string());
        out.write_record(["name", "time", "value", "x", "y", "z"])
            .map_err(fmt)?;
        for o in &self.observations {
            let loc: [String; 3] = match o.location {
                Some(l) => l.map(|v| v.to_string()),
                None => Default::default(),
            };
            let value = o.value.map(|v| v.to_string()).unwrap_or_default();
            out.write_record([
                o.name.clone(),
                o.time.to_string(),
                value,
                loc[0].clone(),
                loc[1].clone(),
                loc[2].clone(),
            ])
            .map_err(fmt)?;
        }
        out.flush().map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save_observations_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_observations_csv(std::io::BufWriter::new(f))
    }

    pub fn save_json(&self, path: &Path, seed: Option<u64>) -> Result<()> {
        std::fs::write(path, self.to_json(seed)).map_err(|e| Error::io(path, e))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_margin_and_tolerance() {
        assert!(ClaimRecord::new("c", 0.0, 1.0, 1.0, 0.0).passed());
        assert!(ClaimRecord::new("c", 0.0, 1.0 + 1e-10, 1.0, 1e-9).passed());
        let r = ClaimRecord::new("c", 0.0, 1.1, 1.0, 1e-9);
        assert_eq!(r.verdict, Verdict::Flag);
        assert!((r.margin + 0.1).abs() < 1e-12);
        assert_eq!(
            ClaimRecord::new("c", 0.0, f64::NAN, 1.0, 1.0).verdict,
            Verdict::Flag
        );
    }

    #[test]
    fn json_uses_the_documented_schema() {
        let mut rep = Report::new("demo");
        rep.push(ClaimRecord::new("a", 0.5, 1.0, 2.0, 1e-9));
        let v: serde_json::Value = serde_json::from_str(&rep.to_json(Some(7))).unwrap();
        let rec = &v["records"][0];
        for key in [
            "claim",
            "time",
            "lhs",
            "rhs",
            "margin",
            "verdict",
            "tolerance",
        ] {
            assert!(rec.get(key).is_some(), "missing {key}");
        }
        assert_eq!(rec["verdict"], "PASS");
        assert_eq!(v["seed"], 7);
    }

    #[test]
    fn counts_group_by_claim() {
        let mut rep = Report::new("demo");
        rep.push(ClaimRecord::new("a", 0.0, 0.0, 1.0, 0.0));
        rep.push(ClaimRecord::new("b", 0.0, 2.0, 1.0, 0.0));
        rep.push(ClaimRecord::new("a", 1.0, 3.0, 1.0, 0.0));
        assert_eq!(rep.counts(), Counts { pass: 1, flag: 2 });
        let by = rep.counts_by_claim();
        assert_eq!(by[0], ("a".to_string(), Counts { pass: 1, flag: 1 }));
        assert_eq!(by[1], ("b".to_string(), Counts { pass: 0, flag: 1 }));
    }

    #[test]
    fn csv_is_stable() {
        let mut rep = Report::new("demo");
        rep.push(ClaimRecord::new("a", 0.1, 1.0, 2.0, 1e-9).at([1.0, 2.0, 3.0]));
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "claim,time,lhs,rhs,margin,verdict,tolerance,x,y,z\na,0.1,1,2,1,PASS,0.000000001,1,2,3\n"
        );
    }
}
