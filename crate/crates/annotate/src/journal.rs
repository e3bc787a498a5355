//! Append-only JSON-lines log of item mutations.

use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::edit::EdgeEdit;
use crate::error::{AnnotateError, Result};
use crate::session::Status;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JournalEntry {
    Edit { seq: u64, edit: EdgeEdit },
    Status { seq: u64, status: Status },
}

impl JournalEntry {
    pub fn seq(&self) -> u64 {
        match self {
            JournalEntry::Edit { seq, .. } | JournalEntry::Status { seq, .. } => *seq,
        }
    }
}

#[derive(Debug)]
pub struct Journal {
    path: PathBuf,
    file: File,
    next_seq: u64,
}

fn io_err(path: &Path, e: std::io::Error) -> AnnotateError {
    depthedge::Error::io(path, e).into()
}

impl Journal {
    /// Opens (creating if needed) the journal at `path` and returns the
    /// entries already recorded. A torn final line left by a crash during
    /// an append is discarded and cut from the file.
    pub fn open(path: &Path) -> Result<(Journal, Vec<JournalEntry>)> {
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        let mut text = String::new();
        file.read_to_string(&mut text).map_err(|e| io_err(path, e))?;
        let complete = text.rfind('\n').map_or(0, |i| i + 1);
        if complete < text.len() {
            file.set_len(complete as u64).map_err(|e| io_err(path, e))?;
            file.sync_data().map_err(|e| io_err(path, e))?;
        }
        let mut entries = Vec::new();
        for (lineno, line) in text[..complete].lines().enumerate() {
            let entry: JournalEntry = serde_json::from_str(line).map_err(|e| AnnotateError::Journal {
                path: path.to_path_buf(),
                msg: format!("line {}: {e}", lineno + 1),
            })?;
            if entry.seq() != entries.len() as u64 {
                return Err(AnnotateError::Journal {
                    path: path.to_path_buf(),
                    msg: format!("line {}: expected seq {}, got {}", lineno + 1, entries.len(), entry.seq()),
                });
            }
            entries.push(entry);
        }
        let next_seq = entries.len() as u64;
        Ok((
            Journal {
                path: path.to_path_buf(),
                file,
                next_seq,
            },
            entries,
        ))
    }

    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    /// Writes one entry as a single line and syncs it to disk.
    pub fn append(&mut self, entry: &JournalEntry) -> Result<()> {
        debug_assert_eq!(entry.seq(), self.next_seq);
        let mut line = serde_json::to_vec(entry).map_err(depthedge::Error::from)?;
        line.push(b'\n');
        self.file.write_all(&line).map_err(|e| io_err(&self.path, e))?;
        self.file.sync_data().map_err(|e| io_err(&self.path, e))?;
        self.next_seq += 1;
        Ok(())
    }
}
