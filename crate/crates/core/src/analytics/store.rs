//! Append-only statement log, one NDJSON file per simulation.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use super::AnalyticsStatement;
use crate::model::RecordId;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("event store {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path} line {line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Per-simulation state guarded by that simulation's lock.
#[derive(Debug, Default)]
struct SimLog {
    /// Lines written so far; `None` until the file has been counted.
    count: Option<u64>,
}

/// Statements live in `<dir>/<simId>.ndjson`; a statement's sequence number
/// is its 1-based line number.
#[derive(Debug)]
pub struct EventStore {
    dir: PathBuf,
    logs: Mutex<HashMap<RecordId, Arc<Mutex<SimLog>>>>,
}

impl EventStore {
    /// Opens (creating if needed) the store, dropping any partially written
    /// final line left by an interrupted append.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(io_error(&dir))?;
        for entry in std::fs::read_dir(&dir).map_err(io_error(&dir))? {
            let path = entry.map_err(io_error(&dir))?.path();
            if path.extension().is_some_and(|e| e == "ndjson") {
                repair_tail(&path)?;
            }
        }
        Ok(Self {
            dir,
            logs: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, sim: &RecordId) -> PathBuf {
        self.dir.join(format!("{sim}.ndjson"))
    }

    fn log(&self, sim: &RecordId) -> Arc<Mutex<SimLog>> {
        let mut logs = self.logs.lock().expect("event store lock");
        logs.entry(sim.clone()).or_default().clone()
    }

    /// Durably appends `statement` and returns its sequence number.
    pub fn append(&self, statement: &AnalyticsStatement) -> Result<u64, StoreError> {
        let sim = &statement.object_sim_id;
        let log = self.log(sim);
        let mut log = log.lock().expect("sim log lock");
        let path = self.path(sim);
        let count = match log.count {
            Some(n) => n,
            None => count_lines(&path)?,
        };
        let mut line = serde_json::to_string(statement).expect("statement serializes");
        line.push('\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(io_error(&path))?;
        let before = file.metadata().map_err(io_error(&path))?.len();
        if let Err(e) = file.write_all(line.as_bytes()).and_then(|_| file.sync_data()) {
            let _ = file.set_len(before);
            return Err(io_error(&path)(e));
        }
        log.count = Some(count + 1);
        Ok(count + 1)
    }

    /// Every statement for `sim`, in append order.
    pub fn read(&self, sim: &RecordId) -> Result<Vec<AnalyticsStatement>, StoreError> {
        let log = self.log(sim);
        let _guard = log.lock().expect("sim log lock");
        let path = self.path(sim);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(io_error(&path)(e)),
        };
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io_error(&path))?;
            let statement = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                path: path.clone(),
                line: i + 1,
                message: e.to_string(),
            })?;
            out.push(statement);
        }
        Ok(out)
    }

    /// Simulations with at least one stored statement, sorted.
    pub fn sims(&self) -> Result<Vec<RecordId>, StoreError> {
        let mut out = Vec::new();
        for entry in std::fs::read_dir(&self.dir).map_err(io_error(&self.dir))? {
            let path = entry.map_err(io_error(&self.dir))?.path();
            if path.extension().is_some_and(|e| e == "ndjson") {
                if let Some(id) = path.file_stem().and_then(|s| s.to_str()).and_then(|s| RecordId::parse(s).ok()) {
                    out.push(id);
                }
            }
        }
        out.sort();
        Ok(out)
    }
}

fn count_lines(path: &Path) -> Result<u64, StoreError> {
    match std::fs::read(path) {
        Ok(bytes) => Ok(bytes.iter().filter(|b| **b == b'\n').count() as u64),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(0),
        Err(e) => Err(io_error(path)(e)),
    }
}

fn repair_tail(path: &Path) -> Result<(), StoreError> {
    let bytes = std::fs::read(path).map_err(io_error(path))?;
    let keep = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
    if keep < bytes.len() {
        log::warn!("{}: dropping {} bytes of incomplete statement", path.display(), bytes.len() - keep);
        let file = OpenOptions::new().write(true).open(path).map_err(io_error(path))?;
        file.set_len(keep as u64).map_err(io_error(path))?;
        file.sync_data().map_err(io_error(path))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EventType;

    fn statement(sim: &str, ts: u64) -> AnalyticsStatement {
        AnalyticsStatement {
            actor: "a".into(),
            verb: EventType::Engagement,
            object_sim_id: RecordId::parse(sim).unwrap(),
            control_ref: None,
            result_value: None,
            prev_value: None,
            timestamp: ts,
            session_id: "s".into(),
        }
    }

    #[test]
    fn sequence_numbers_per_sim() {
        let dir = tempfile::tempdir().unwrap();
        let store = EventStore::open(dir.path()).unwrap();
        assert_eq!(store.append(&statement("a-sim", 1)).unwrap(), 1);
        assert_eq!(store.append(&statement("a-sim", 2)).unwrap(), 2);
        assert_eq!(store.append(&statement("b-sim", 3)).unwrap(), 1);
        assert_eq!(store.sims().unwrap().len(), 2);
    }

    #[test]
    fn reopen_reads_same_statements() {
        let dir = tempfile::tempdir().unwrap();
        let written: Vec<_> = (1..=5).map(|t| statement("a-sim", t)).collect();
        {
            let store = EventStore::open(dir.path()).unwrap();
            for s in &written {
                store.append(s).unwrap();
            }
        }
        let store = EventStore::open(dir.path()).unwrap();
        assert_eq!(store.read(&RecordId::parse("a-sim").unwrap()).unwrap(), written);
        assert_eq!(store.append(&statement("a-sim", 6)).unwrap(), 6);
    }

    #[test]
    fn partial_tail_is_dropped_on_open() {
        let dir = tempfile::tempdir().unwrap();
        {
            let store = EventStore::open(dir.path()).unwrap();
            store.append(&statement("a-sim", 1)).unwrap();
        }
        let path = dir.path().join("a-sim.ndjson");
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"actor\": \"half").unwrap();
        drop(f);
        let store = EventStore::open(dir.path()).unwrap();
        let sim = RecordId::parse("a-sim").unwrap();
        assert_eq!(store.read(&sim).unwrap().len(), 1);
        assert_eq!(store.append(&statement("a-sim", 2)).unwrap(), 2);
    }

    #[test]
    fn unknown_sim_reads_empty() {
        let dir = tempfile::tempdir().unwrap();
        let store = EventStore::open(dir.path()).unwrap();
        assert!(store.read(&RecordId::parse("nothing").unwrap()).unwrap().is_empty());
    }
}
