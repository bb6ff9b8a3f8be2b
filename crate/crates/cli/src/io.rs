//! File plumbing shared by every subcommand: reads with path context,
//! atomic writes (temp file + rename, so a crash never leaves a torn
//! artifact), SHA-256 fingerprints, and CSV-to-JSON conversion for the
//! report bundle.

use std::fs;
use std::io;
use std::path::Path;

use essc_core::{Error, Result};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Wrap an I/O error with the path it concerns.
fn with_path(path: &Path, e: io::Error) -> Error {
    Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| with_path(path, e))
}

pub fn read_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| with_path(path, e))
}

/// Write via a hidden sibling temp file and rename into place, creating
/// parent directories as needed.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| with_path(dir, e))?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Parameter(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes).map_err(|e| with_path(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| with_path(path, e))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

/// Parse one written CSV back into `{"columns": [...], "rows": [[...]]}`,
/// skipping `#` provenance comments. Cells keep their most specific JSON
/// type: integer, then float, then string.
pub fn csv_to_json(text: &str) -> Result<Value> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Dataset("empty CSV".into()))?;
    let columns: Vec<Value> = header.split(',').map(|c| Value::from(c)).collect();
    let rows: Vec<Value> = lines
        .map(|line| Value::from(line.split(',').map(cell_value).collect::<Vec<_>>()))
        .collect();
    Ok(serde_json::json!({ "columns": columns, "rows": rows }))
}

fn cell_value(cell: &str) -> Value {
    if let Ok(i) = cell.parse::<i64>() {
        return Value::from(i);
    }
    if let Ok(f) = cell.parse::<f64>() {
        if f.is_finite() {
            return Value::from(f);
        }
    }
    Value::from(cell)
}
