//! JSON-lines record of completed seeds, for resuming long runs.
//!
//! The first line is a [`CheckpointHeader`] describing the run; every further
//! line is one [`SeedEntry`], written with a single `write_all` on an
//! append-mode file. A trailing line cut short by an interruption is ignored
//! on resume.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search::Mode;

pub const FORMAT: &str = "semioval-checkpoint/1";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {message}")]
    Malformed { path: PathBuf, line: usize, message: String },
    #[error("{path}: checkpoint was written for a different run ({field} differs)")]
    Mismatch { path: PathBuf, field: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format: String,
    pub q: u32,
    pub field_poly: String,
    pub size_min: usize,
    pub size_max: usize,
    pub threshold: usize,
    pub mode: Mode,
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub seed: usize,
    /// Canonical bits of the seed, hex.
    pub key: String,
    /// Canonical bits of the semiovals found below the seed, hex, sorted.
    pub found: Vec<String>,
    pub nodes: u64,
}

pub struct Checkpoint {
    path: PathBuf,
    file: Mutex<File>,
    done: BTreeMap<usize, SeedEntry>,
}

impl Checkpoint {
    /// Start a new checkpoint file, replacing any existing one.
    pub fn create(path: &Path, header: &CheckpointHeader) -> Result<Self, CheckpointError> {
        let io = |source| CheckpointError::Io { path: path.to_path_buf(), source };
        let mut file = File::create(path).map_err(io)?;
        let mut line = serde_json::to_string(header).expect("header serializes");
        line.push('\n');
        file.write_all(line.as_bytes()).map_err(io)?;
        Ok(Checkpoint { path: path.to_path_buf(), file: Mutex::new(file), done: BTreeMap::new() })
    }

    /// Load completed seeds from an existing checkpoint and append to it.
    pub fn resume(path: &Path, header: &CheckpointHeader) -> Result<Self, CheckpointError> {
        let io = |source| CheckpointError::Io { path: path.to_path_buf(), source };
        let text = std::fs::read_to_string(path).map_err(io)?;
        let malformed = |line: usize, message: String| CheckpointError::Malformed { path: path.to_path_buf(), line, message };
        let pieces: Vec<&str> = text.split_inclusive('\n').collect();
        let first = pieces.first().ok_or_else(|| malformed(1, "missing header".into()))?;
        let stored: CheckpointHeader = serde_json::from_str(first).map_err(|e| malformed(1, e.to_string()))?;
        let mismatch = |field| CheckpointError::Mismatch { path: path.to_path_buf(), field };
        let checks: [(&'static str, bool); 8] = [
            ("format", stored.format == header.format),
            ("q", stored.q == header.q),
            ("field_poly", stored.field_poly == header.field_poly),
            ("size_min", stored.size_min == header.size_min),
            ("size_max", stored.size_max == header.size_max),
            ("threshold", stored.threshold == header.threshold),
            ("mode", stored.mode == header.mode),
            ("seeds", stored.seeds == header.seeds),
        ];
        if let Some((field, _)) = checks.iter().find(|(_, ok)| !ok) {
            return Err(mismatch(field));
        }
        let mut done = BTreeMap::new();
        let mut valid_len = first.len();
        for (i, piece) in pieces.iter().enumerate().skip(1) {
            let last = i + 1 == pieces.len();
            if piece.trim().is_empty() {
                valid_len += piece.len();
                continue;
            }
            match serde_json::from_str::<SeedEntry>(piece) {
                Ok(entry) if piece.ends_with('\n') => {
                    if entry.seed >= header.seeds {
                        return Err(malformed(i + 1, format!("seed {} out of range", entry.seed)));
                    }
                    done.insert(entry.seed, entry);
                    valid_len += piece.len();
                }
                Err(e) if !last => return Err(malformed(i + 1, e.to_string())),
                _ => log::warn!("{}: dropping incomplete final line", path.display()),
            }
        }
        let file = OpenOptions::new().append(true).open(path).map_err(io)?;
        file.set_len(valid_len as u64).map_err(io)?;
        Ok(Checkpoint { path: path.to_path_buf(), file: Mutex::new(file), done })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn completed(&self) -> &BTreeMap<usize, SeedEntry> {
        &self.done
    }

    pub fn append(&self, entry: &SeedEntry) -> Result<(), CheckpointError> {
        let mut line = serde_json::to_string(entry).expect("entry serializes");
        line.push('\n');
        let mut file = self.file.lock().expect("checkpoint lock");
        file.write_all(line.as_bytes()).map_err(|source| CheckpointError::Io { path: self.path.clone(), source })
    }
}

pub fn parse_hex(text: &str) -> Option<u128> {
    u128::from_str_radix(text, 16).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> CheckpointHeader {
        CheckpointHeader {
            format: FORMAT.into(),
            q: 8,
            field_poly: "1,1,0,1".into(),
            size_min: 9,
            size_max: 14,
            threshold: 9,
            mode: Mode::All,
            seeds: 10,
        }
    }

    #[test]
    fn resume_reads_back_entries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.jsonl");
        let cp = Checkpoint::create(&path, &header()).unwrap();
        let entry = SeedEntry { seed: 3, key: "ff".into(), found: vec!["1f".into()], nodes: 12 };
        cp.append(&entry).unwrap();
        drop(cp);
        // simulate an interrupted write
        let mut f = OpenOptions::new().append(true).open(&path).unwrap();
        f.write_all(b"{\"seed\":4,\"ke").unwrap();
        drop(f);
        let cp = Checkpoint::resume(&path, &header()).unwrap();
        assert_eq!(cp.completed().len(), 1);
        assert_eq!(cp.completed()[&3], entry);
        cp.append(&SeedEntry { seed: 5, key: "0".into(), found: vec![], nodes: 1 }).unwrap();
        drop(cp);
        let cp = Checkpoint::resume(&path, &header()).unwrap();
        assert_eq!(cp.completed().keys().copied().collect::<Vec<_>>(), [3, 5]);
    }

    #[test]
    fn resume_rejects_other_runs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.jsonl");
        Checkpoint::create(&path, &header()).unwrap();
        let mut other = header();
        other.size_max = 15;
        assert!(matches!(Checkpoint::resume(&path, &other), Err(CheckpointError::Mismatch { field: "size_max", .. })));
        assert!(matches!(Checkpoint::resume(&dir.path().join("missing"), &header()), Err(CheckpointError::Io { .. })));
    }
}
