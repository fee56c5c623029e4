//! On-disk cache for the 12*H(n) table.
//!
//! Format (UTF-8, LF line endings, bit-exact):
//!
//! ```text
//! hurwitz12,v1,max_n=<N>
//! 0,-1
//! 1,0
//! ...
//! N,<value>
//! ```
//!
//! Lines cover 0..=N contiguously in increasing n. A corrupt or unreadable
//! file is never fatal: the table is recomputed and the file overwritten.
//! Writes go through a temp file and an atomic rename.

use crate::trace_formula::HurwitzTable;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const CACHE_FILE_NAME: &str = "hurwitz12.csv";
pub const CACHE_DIR_ENV: &str = "SSL_FORMS_CACHE_DIR";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("corrupt cache {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
}

/// What the cache layer did for one request; serialized into CLI output.
#[derive(Clone, Debug, Default, Serialize, PartialEq, Eq)]
pub struct CacheStats {
    pub file: Option<String>,
    pub loaded_max_n: Option<usize>,
    pub written_max_n: Option<usize>,
    pub recomputed: bool,
}

/// Parses a cache file into a table, validating header, contiguity, and
/// the structural table invariants.
pub fn load(path: &Path) -> Result<HurwitzTable, CacheError> {
    let text = fs::read_to_string(path).map_err(|source| CacheError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let corrupt = |reason: String| CacheError::Corrupt {
        path: path.to_path_buf(),
        reason,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| corrupt("empty file".into()))?;
    let max_n: usize = header
        .strip_prefix("hurwitz12,v1,max_n=")
        .ok_or_else(|| corrupt(format!("bad header {header:?}")))?
        .parse()
        .map_err(|e| corrupt(format!("bad max_n: {e}")))?;
    let mut values = Vec::with_capacity(max_n + 1);
    for (i, line) in lines.enumerate() {
        let (n_str, v_str) = line
            .split_once(',')
            .ok_or_else(|| corrupt(format!("line {}: no comma", i + 2)))?;
        let n: usize = n_str
            .parse()
            .map_err(|e| corrupt(format!("line {}: bad n: {e}", i + 2)))?;
        if n != i {
            return Err(corrupt(format!("line {}: expected n={i}, got {n}", i + 2)));
        }
        let v: i64 = v_str
            .parse()
            .map_err(|e| corrupt(format!("line {}: bad value: {e}", i + 2)))?;
        values.push(v);
    }
    if values.len() != max_n + 1 {
        return Err(corrupt(format!(
            "header says max_n={max_n} but {} entries follow",
            values.len()
        )));
    }
    HurwitzTable::from_values(values).map_err(|e| corrupt(e.to_string()))
}

/// Serializes the table to the pinned format and atomically replaces
/// `path` (write temp file, then rename).
pub fn store(path: &Path, table: &HurwitzTable) -> Result<(), CacheError> {
    let io_err = |source: std::io::Error| CacheError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    let mut body = String::with_capacity(12 * table.values().len());
    body.push_str(&format!("hurwitz12,v1,max_n={}\n", table.max_n()));
    for (n, v) in table.values().iter().enumerate() {
        body.push_str(&format!("{n},{v}\n"));
    }
    let tmp = path.with_extension("csv.tmp");
    {
        let mut f = fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(body.as_bytes()).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

/// Returns a table covering at least `needed_max_n`, loading from the
/// cache directory when possible, extending and rewriting it when the
/// cached range is too small, and recomputing (with a warning on stderr)
/// when the file is corrupt.
pub fn ensure_table(dir: &Path, needed_max_n: usize) -> (HurwitzTable, CacheStats) {
    let path = dir.join(CACHE_FILE_NAME);
    let mut stats = CacheStats {
        file: Some(path.display().to_string()),
        ..CacheStats::default()
    };
    match load(&path) {
        Ok(table) => {
            stats.loaded_max_n = Some(table.max_n());
            if table.max_n() >= needed_max_n {
                return (table, stats);
            }
        }
        Err(CacheError::Io { .. }) => {
            // missing file: first run, not worth a warning
        }
        Err(e @ CacheError::Corrupt { .. }) => {
            eprintln!("warning: {e}; recomputing");
            stats.recomputed = true;
        }
    }
    let table = HurwitzTable::up_to(needed_max_n);
    match store(&path, &table) {
        Ok(()) => stats.written_max_n = Some(table.max_n()),
        Err(e) => eprintln!("warning: could not write cache: {e}"),
    }
    (table, stats)
}
