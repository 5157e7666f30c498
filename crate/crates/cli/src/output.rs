//! CSV and JSON writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{Format, Output};
use crate::error::{CliError, CliResult};
use crate::rows::Record;

pub fn to_csv<R: Record>(rows: &[R]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(R::HEADER).map_err(io)?;
    for r in rows {
        w.write_record(r.fields()).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// `{ "meta": ..., "rows": [...] }`, numbers rounded like the CSV.
pub fn to_json<R: Record + Serialize + Clone>(rows: &[R], meta: Value) -> CliResult<Vec<u8>> {
    let rounded: Vec<R> = rows.iter().cloned().map(Record::rounded).collect();
    let doc = serde_json::json!({ "meta": meta, "rows": rounded });
    let mut bytes = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn write<R: Record + Serialize + Clone>(rows: &[R], meta: Value, out: &Output) -> CliResult<()> {
    let bytes = match out.format() {
        Format::Csv => to_csv(rows)?,
        Format::Json => to_json(rows, meta)?,
    };
    match &out.path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout().lock().write_all(&bytes).map_err(CliError::from),
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct Document<M, R> {
    pub meta: M,
    pub rows: Vec<R>,
}

pub fn read_json<M: DeserializeOwned, R: DeserializeOwned>(path: &Path) -> CliResult<Document<M, R>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}
