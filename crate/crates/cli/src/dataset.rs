//! JSON-lines datasets: one `{"id": ..., "points": [[...], ...]}` object per
//! line.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use curvehash::Curve;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    points: Vec<Vec<f64>>,
}

/// Parses a dataset. Blank lines are skipped; every other line must hold
/// one record. All records share one dimension and ids are unique.
pub fn parse_dataset<R: BufRead>(reader: R) -> Result<Vec<Curve>> {
    let mut curves: Vec<Curve> = Vec::new();
    let mut ids = HashSet::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Input(format!("line {lineno}: {msg}"));
        let record: Record = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        if record.points.is_empty() {
            return Err(bad(format!("curve {:?} has no points", record.id)));
        }
        if let Some(first) = curves.first() {
            let dim = record.points[0].len();
            if dim != first.dim() {
                return Err(bad(format!("dimension {dim} differs from {} on earlier lines", first.dim())));
            }
        }
        if !ids.insert(record.id.clone()) {
            return Err(bad(format!("duplicate id {:?}", record.id)));
        }
        curves.push(Curve::new(record.id, record.points).map_err(|e| bad(e.to_string()))?);
    }
    Ok(curves)
}

pub fn read_dataset(path: &Path) -> Result<Vec<Curve>> {
    let file = File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_dataset(BufReader::new(file))
}

/// Writes one record per `\n`-terminated line.
pub fn write_dataset<'a, W: Write>(mut w: W, curves: impl IntoIterator<Item = &'a Curve>) -> Result<()> {
    for c in curves {
        let record = Record { id: c.id().to_string(), points: c.points().map(<[f64]>::to_vec).collect() };
        let line = serde_json::to_string(&record).map_err(|e| CliError::Input(e.to_string()))?;
        w.write_all(line.as_bytes())?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
