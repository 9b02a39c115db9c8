//! JSONL trace files.
//!
//! A trace is a header line followed by one episode record per line. The
//! canonical form carries no timestamps, so deterministic policies produce
//! byte-identical traces across runs. The header doubles as the resume
//! watermark: a resumed run must match it exactly.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::EpisodeRecord;
use crate::error::Error;

pub const TRACE_SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub schema_version: String,
    pub policy: String,
    pub master_seed: u64,
    pub episodes: u64,
    pub horizon: u32,
}

impl TraceHeader {
    pub fn new(policy: &str, master_seed: u64, episodes: u64, horizon: u32) -> TraceHeader {
        TraceHeader {
            schema_version: TRACE_SCHEMA_VERSION.to_string(),
            policy: policy.to_string(),
            master_seed,
            episodes,
            horizon,
        }
    }
}

/// Incremental trace writer: header first, then records in episode order.
pub struct TraceWriter {
    out: BufWriter<File>,
}

impl TraceWriter {
    /// Create a fresh trace file (truncating any existing one).
    pub fn create(path: &Path, header: &TraceHeader) -> Result<TraceWriter, Error> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", serde_json::to_string(header)?)?;
        out.flush()?;
        Ok(TraceWriter { out })
    }

    /// Open an existing trace for appending after a resume check.
    pub fn append(path: &Path) -> Result<TraceWriter, Error> {
        let file = OpenOptions::new().append(true).open(path)?;
        Ok(TraceWriter { out: BufWriter::new(file) })
    }

    pub fn write_record(&mut self, record: &EpisodeRecord) -> Result<(), Error> {
        writeln!(self.out, "{}", serde_json::to_string(record)?)?;
        self.out.flush()?;
        Ok(())
    }
}

/// Read a full trace file.
pub fn read_trace(path: &Path) -> Result<(TraceHeader, Vec<EpisodeRecord>), Error> {
    let file = BufReader::new(File::open(path)?);
    let mut lines = file.lines();
    let header_line =
        lines.next().ok_or_else(|| Error::validation("trace file is empty"))??;
    let header: TraceHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::validation(format!("bad trace header: {e}")))?;
    if header.schema_version != TRACE_SCHEMA_VERSION {
        return Err(Error::validation(format!(
            "trace schema version {:?} not supported (expected {TRACE_SCHEMA_VERSION:?})",
            header.schema_version
        )));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: EpisodeRecord = serde_json::from_str(&line).map_err(|e| {
            Error::validation(format!("bad episode record on line {}: {e}", lineno + 2))
        })?;
        records.push(record);
    }
    Ok((header, records))
}

/// Inspect an existing trace for resumption: returns the header and the
/// number of complete records.
pub fn resume_point(path: &Path) -> Result<(TraceHeader, u64), Error> {
    let (header, records) = read_trace(path)?;
    for (i, record) in records.iter().enumerate() {
        if record.episode_index != i as u64 {
            return Err(Error::validation(format!(
                "trace records out of order at line {} (episode {})",
                i + 2,
                record.episode_index
            )));
        }
    }
    Ok((header.clone(), records.len() as u64))
}
