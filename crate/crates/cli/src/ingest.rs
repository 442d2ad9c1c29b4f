use std::fs::File;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("cannot open {path}: {reason}")]
    Open { path: String, reason: String },
    #[error("expected header `return` or `timestamp,return`, found `{0}`")]
    Header(String),
    #[error("line {line}: invalid return value `{value}`")]
    BadRow { line: u64, value: String },
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error("no return rows in {0}")]
    Empty(String),
}

/// Reads returns in file order from a CSV with header `return` or
/// `timestamp,return`. Timestamps are carried through unparsed.
pub fn ingest_returns(path: &Path) -> Result<Vec<f64>, IngestError> {
    let shown = path.display().to_string();
    let file = File::open(path).map_err(|e| IngestError::Open {
        path: shown.clone(),
        reason: e.to_string(),
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = rdr
        .headers()
        .map_err(|e| IngestError::Malformed {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    let names: Vec<&str> = headers.iter().collect();
    let col = match names.as_slice() {
        ["return"] => 0,
        ["timestamp", "return"] => 1,
        _ => return Err(IngestError::Header(names.join(","))),
    };
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::Malformed {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = rec.get(col).unwrap_or("");
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ => {
                return Err(IngestError::BadRow {
                    line,
                    value: field.to_string(),
                })
            }
        }
    }
    if out.is_empty() {
        return Err(IngestError::Empty(shown));
    }
    Ok(out)
}

/// Writes `timestamp,return` rows with the step index as timestamp. Values
/// use the shortest representation that parses back to the same float.
pub fn write_returns(path: &Path, returns: &[f64]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["timestamp", "return"])?;
    for (k, r) in returns.iter().enumerate() {
        w.write_record([k.to_string(), r.to_string()])?;
    }
    w.flush()
}
