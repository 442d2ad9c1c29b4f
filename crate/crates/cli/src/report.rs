use std::path::Path;

use serde_json::{json, Value};

pub const ARTIFACT: &str = "praginfo";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// JSON number, or the strings `"inf"`, `"-inf"`, `"nan"` for values JSON
/// cannot carry.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

pub fn envelope(kind: &str, seed: Option<u64>, config: Value, body: (&str, Value)) -> Value {
    let mut v = json!({
        "artifact": ARTIFACT,
        "version": VERSION,
        "kind": kind,
        "seed": seed,
        "config": config,
    });
    v[body.0] = body.1;
    v
}

pub fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    std::fs::write(path, text)
}

/// Per-step series with a header row; floats in shortest round-trip form.
pub struct Series {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Series {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }
}
