//! Append-only CSV store of raw amplification data.

use std::fs::OpenOptions;
use std::path::{Path, PathBuf};

use crate::error::{EstimatorError, Result};

pub const STORE_HEADER: [&str; 5] = ["timestamp", "gate", "n_gate", "n_shots", "t_exec_seconds"];

#[derive(Debug, Clone, PartialEq)]
pub struct StoreRecord {
    /// Experiment clock: accumulated t_exec of all jobs recorded so far,
    /// including this one. Wall-clock time would break reproducibility.
    pub timestamp: f64,
    pub gate: String,
    pub n_gate: u64,
    pub n_shots: u64,
    pub t_exec: f64,
}

#[derive(Debug)]
pub struct ExperimentStore {
    path: PathBuf,
    clock: f64,
}

impl ExperimentStore {
    /// Opens `path` for appending, writing the header if the file is new.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let clock = if path.exists() {
            load_store(&path)?.last().map_or(0.0, |r| r.timestamp)
        } else {
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(STORE_HEADER)?;
            w.flush()?;
            0.0
        };
        Ok(Self { path, clock })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, gate: &str, n_gate: u64, n_shots: u64, t_exec: f64) -> Result<()> {
        let file = OpenOptions::new().append(true).open(&self.path)?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        self.clock += t_exec;
        w.write_record([
            format!("{:.3}", self.clock),
            gate.to_string(),
            n_gate.to_string(),
            n_shots.to_string(),
            format!("{t_exec}"),
        ])?;
        w.flush()?;
        Ok(())
    }
}

pub fn load_store(path: impl AsRef<Path>) -> Result<Vec<StoreRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().collect::<Vec<_>>() != STORE_HEADER {
        return Err(EstimatorError::Store("unexpected header".into()));
    }
    let parse_err = |field: &str| EstimatorError::Store(format!("bad {field}"));
    r.records()
        .map(|rec| {
            let rec = rec?;
            Ok(StoreRecord {
                timestamp: rec[0].parse().map_err(|_| parse_err("timestamp"))?,
                gate: rec[1].to_string(),
                n_gate: rec[2].parse().map_err(|_| parse_err("n_gate"))?,
                n_shots: rec[3].parse().map_err(|_| parse_err("n_shots"))?,
                t_exec: rec[4].parse().map_err(|_| parse_err("t_exec_seconds"))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        let mut s = ExperimentStore::open(&path).unwrap();
        s.append("X q0", 0, 1000, 5.0).unwrap();
        s.append("Toffoli q0 q2 q1", 100, 1000, 7.25).unwrap();
        drop(s);
        let mut s = ExperimentStore::open(&path).unwrap();
        s.append("X q0", 5, 1000, 1.0).unwrap();
        let rows = load_store(&path).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].gate, "Toffoli q0 q2 q1");
        assert_eq!(rows[1].t_exec, 7.25);
        assert_eq!(rows[2].timestamp, 13.25);
    }
}
