// SPDX-License-Identifier: MIT OR Apache-2.0

//! Series ingestion: one value per line, or a CSV column.

use crate::harness::hex_digest;
use crate::stats::Sample;
use crate::{Error, Result};
use std::path::Path;

/// A parsed input file and the SHA-256 of its bytes.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesFile {
    pub sample: Sample,
    pub fingerprint: String,
}

/// Reads `path`. `column` is 1-based and defaults to the first field.
pub fn read_series(path: &Path, column: Option<usize>) -> Result<SeriesFile> {
    let bytes = std::fs::read(path)?;
    let values = parse_series(&bytes, column)?;
    let sample = Sample::new(values)?.with_source(path.display().to_string());
    Ok(SeriesFile {
        sample,
        fingerprint: format!("sha256:{}", hex_digest(&bytes)),
    })
}

/// Blank lines are skipped. A non-numeric cell in the first non-blank row is
/// taken as a header; anywhere else it is a [`Error::Parse`] naming the
/// 1-based line.
pub fn parse_series(bytes: &[u8], column: Option<usize>) -> Result<Vec<f64>> {
    let col = match column {
        Some(0) => return Err(Error::Usage("--column is 1-based".into())),
        Some(c) => c - 1,
        None => 0,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut values = Vec::new();
    let mut first = true;
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let cell = rec.get(col).ok_or_else(|| Error::Parse {
            line,
            message: format!("row has {} field(s), column {} requested", rec.len(), col + 1),
        })?;
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(Error::Parse {
                    line,
                    message: format!("non-finite value {v}"),
                })
            }
            Err(_) if first => {}
            Err(_) => {
                return Err(Error::Parse {
                    line,
                    message: format!("not a number: {cell:?}"),
                })
            }
        }
        first = false;
    }
    if values.is_empty() {
        return Err(Error::InvalidData("input contains no observations".into()));
    }
    Ok(values)
}
