//! Text form of index tables.
//!
//! ```text
//! # pva index table
//! depth 2
//! 1 1 1 : 1
//! 1 1 2 : 1 0
//! 3/2 1 2 : 1 -1/2
//! ```
//!
//! After the `depth` header every row is `h k t : k1 … kt` with half-integers
//! written as integers or fractions. Blank lines and lines starting with `#`
//! are ignored. Loading validates every chain and checks that the rows are
//! exactly the chains of the stated depth.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use pva_core::liealg::HalfInt;
use pva_core::walg::IndexTable;
use pva_core::Error;

use crate::error::{CliError, Result};

pub fn write_table(table: &IndexTable, mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "# pva index table")?;
    writeln!(w, "depth {}", table.depth())?;
    for (h, k, seq) in table.rows() {
        write!(w, "{h} {k} {} :", seq.len())?;
        for v in seq {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    w.flush()
}

pub fn save_table(table: &IndexTable, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_table(table, BufWriter::new(file)).map_err(|e| CliError::io(path, e))
}

fn half(token: &str) -> Option<HalfInt> {
    token.parse().ok()
}

fn malformed(origin: &str, line: usize, msg: impl Into<String>) -> CliError {
    CliError::At {
        at: format!("{origin}:{line}"),
        source: Error::MalformedTable(msg.into()),
    }
}

/// Reads a table; `origin` names the source in diagnostics.
pub fn read_table(r: impl BufRead, origin: &str) -> Result<IndexTable> {
    let mut depth = None;
    let mut rows = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let n = idx + 1;
        let line = line.map_err(|e| CliError::io(origin, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if depth.is_none() {
            let d = line
                .strip_prefix("depth")
                .and_then(|rest| rest.trim().parse::<u32>().ok())
                .ok_or_else(|| malformed(origin, n, "expected `depth <n>` header"))?;
            depth = Some(d);
            continue;
        }
        let (head, tail) = line
            .split_once(':')
            .ok_or_else(|| malformed(origin, n, "missing `:`"))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        if head.len() != 3 {
            return Err(malformed(origin, n, "expected `h k t : k1 … kt`"));
        }
        let bad = |t: &str| malformed(origin, n, format!("`{t}` is not a half-integer"));
        let h = half(head[0]).ok_or_else(|| bad(head[0]))?;
        let k = half(head[1]).ok_or_else(|| bad(head[1]))?;
        let t: usize = head[2]
            .parse()
            .map_err(|_| malformed(origin, n, format!("`{}` is not a length", head[2])))?;
        let seq = tail
            .split_whitespace()
            .map(|tok| half(tok).ok_or_else(|| bad(tok)))
            .collect::<Result<Vec<_>>>()?;
        if seq.len() != t {
            return Err(malformed(
                origin,
                n,
                format!("length {t} but {} entries", seq.len()),
            ));
        }
        rows.push((h, k, seq));
    }
    let depth = depth.ok_or_else(|| malformed(origin, 1, "empty table"))?;
    IndexTable::from_rows(depth, rows).map_err(|source| CliError::At {
        at: origin.to_string(),
        source,
    })
}

pub fn load_table(path: &Path) -> Result<IndexTable> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    read_table(BufReader::new(file), &path.display().to_string())
}

/// The conventional file name for a table of the given depth.
pub fn table_file_name(depth: u32) -> String {
    format!("table-{depth}.txt")
}

/// The shallowest `table-<n>.txt` in `dir` with `n ≥ need`.
pub fn find_in_dir(dir: &Path, need: u32) -> Option<PathBuf> {
    let mut best: Option<(u32, PathBuf)> = None;
    for entry in std::fs::read_dir(dir).ok()?.flatten() {
        let name = entry.file_name();
        let Some(n) = name
            .to_str()
            .and_then(|s| s.strip_prefix("table-"))
            .and_then(|s| s.strip_suffix(".txt"))
            .and_then(|s| s.parse::<u32>().ok())
        else {
            continue;
        };
        if n >= need && best.as_ref().is_none_or(|(m, _)| n < *m) {
            best = Some((n, entry.path()));
        }
    }
    best.map(|(_, p)| p)
}
