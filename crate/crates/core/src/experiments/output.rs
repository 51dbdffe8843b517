//! CSV and JSON serialisation of result tables.

use std::io::Write;

use serde::Serialize;

use crate::error::{internal, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Writes `rows` as CSV with a header row, or as a JSON array.
pub fn write_rows<T: Serialize, W: Write>(rows: &[T], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(|e| internal(format!("csv: {e}")))?;
            }
            w.flush().map_err(|e| internal(format!("csv: {e}")))?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows).map_err(|e| internal(format!("json: {e}")))?;
            writeln!(out).map_err(|e| internal(format!("json: {e}")))?;
        }
    }
    Ok(())
}
