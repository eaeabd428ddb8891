//! Deterministic writers: fixed float formatting, no timestamps in data
//! files. Wall-clock information goes to the sidecar `run.log` only.

use fde_sic_core::{Error, Result};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut buf = serde_json::to_vec_pretty(value)
        .map_err(|e| Error::invalid(format!("serialization failed: {e}")))?;
    buf.push(b'\n');
    write_bytes(path, &buf)
}

/// Build a CSV in memory with the given header and row formatter, then write
/// it atomically in one syscall (keeps interrupted runs from leaving a torn
/// file behind that a resume would misread).
pub fn write_csv(
    path: &Path,
    header: &str,
    rows: impl Iterator<Item = String>,
) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "{header}").expect("in-memory write");
    for row in rows {
        writeln!(buf, "{row}").expect("in-memory write");
    }
    write_bytes(path, &buf)
}

/// Fixed-width scientific notation used in every numeric CSV cell, so that
/// rewritten files are byte-identical across runs and platforms.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else {
        format!("{v:.16e}")
    }
}

/// Append a human-readable line to the sidecar log (the one place where
/// wall-clock data is allowed).
pub fn append_log(dir: &Path, line: &str) -> Result<()> {
    let path = dir.join("run.log");
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| io_err(&path, e))?;
    writeln!(f, "{line}").map_err(|e| io_err(&path, e))
}
