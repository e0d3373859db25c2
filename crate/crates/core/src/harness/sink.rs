//! Append-only JSONL record files with crash-tolerant resume.

use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalRecord {
    pub instance_id: String,
    pub model_id: String,
    pub raw_output: String,
    pub latency_ms: u64,
    pub attempt: u32,
    pub error: Option<String>,
}

impl EvalRecord {
    pub fn is_success(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Error)]
pub enum SinkError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// Records in a file, plus whether a torn final line was found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecordLog {
    pub records: Vec<EvalRecord>,
    /// Byte length of the well-formed prefix.
    pub valid_len: u64,
    pub dropped_partial: bool,
}

fn parse_log(path: &Path, bytes: &[u8]) -> Result<RecordLog, SinkError> {
    let mut log = RecordLog::default();
    let mut offset = 0usize;
    let mut line_no = 0;
    while offset < bytes.len() {
        line_no += 1;
        let (line, next, terminated) = match bytes[offset..].iter().position(|&b| b == b'\n') {
            Some(n) => (&bytes[offset..offset + n], offset + n + 1, true),
            None => (&bytes[offset..], bytes.len(), false),
        };
        let text = String::from_utf8_lossy(line);
        if !text.trim().is_empty() {
            match (serde_json::from_str::<EvalRecord>(&text), terminated) {
                (Ok(r), _) => log.records.push(r),
                // An unparseable final line without its newline was never fully committed.
                (Err(_), false) => {
                    log.dropped_partial = true;
                    break;
                }
                (Err(e), true) => {
                    return Err(SinkError::Malformed {
                        path: path.to_owned(),
                        line: line_no,
                        message: e.to_string(),
                    })
                }
            }
        }
        offset = next;
        log.valid_len = offset as u64;
    }
    Ok(log)
}

pub fn read_records(path: &Path) -> Result<RecordLog, SinkError> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|source| SinkError::Io {
            path: path.to_owned(),
            source,
        })?;
    parse_log(path, &bytes)
}

/// Single-writer appender; each record is one `write_all` of a full line.
#[derive(Debug)]
pub struct JsonlSink {
    path: PathBuf,
    file: File,
    existing: Vec<EvalRecord>,
}

impl JsonlSink {
    /// Creates a fresh file, replacing any previous contents.
    pub fn create(path: &Path) -> Result<JsonlSink, SinkError> {
        let file = File::create(path).map_err(|source| SinkError::Io {
            path: path.to_owned(),
            source,
        })?;
        Ok(JsonlSink {
            path: path.to_owned(),
            file,
            existing: Vec::new(),
        })
    }

    /// Opens for appending, keeping complete records and cutting a torn tail.
    pub fn resume(path: &Path) -> Result<JsonlSink, SinkError> {
        let io_err = |source| SinkError::Io {
            path: path.to_owned(),
            source,
        };
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)
            .map_err(io_err)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(io_err)?;
        let log = parse_log(path, &bytes)?;
        if log.valid_len < bytes.len() as u64 {
            file.set_len(log.valid_len).map_err(io_err)?;
        }
        file.seek(SeekFrom::End(0)).map_err(io_err)?;
        if log.valid_len > 0 && bytes[log.valid_len as usize - 1] != b'\n' {
            file.write_all(b"\n").map_err(io_err)?;
        }
        Ok(JsonlSink {
            path: path.to_owned(),
            file,
            existing: log.records,
        })
    }

    pub fn existing(&self) -> &[EvalRecord] {
        &self.existing
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, record: &EvalRecord) -> Result<(), SinkError> {
        let mut line = serde_json::to_vec(record).expect("records serialize");
        line.push(b'\n');
        self.file
            .write_all(&line)
            .and_then(|_| self.file.flush())
            .map_err(|source| SinkError::Io {
                path: self.path.clone(),
                source,
            })
    }
}
