//! Row-oriented numeric output table.
//!
//! Every experiment emits one of these; the writers guarantee a constant
//! column count, finite entries, and reproducible text: CSV rows carry 17
//! significant digits (enough to round-trip an f64 exactly), JSON uses
//! serde_json's shortest-round-trip float encoding. Both end with a final
//! newline and use LF endings regardless of platform.

use serde::Serialize;
use thiserror::Error;

use crate::config::OutputFormat;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("row {row} has {got} entries, expected {expected}")]
    ArityMismatch { row: usize, expected: usize, got: usize },
    #[error("row {row}, column `{column}` is not finite")]
    NonFinite { row: usize, column: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct JsonView<'a> {
    columns: &'a [String],
    rows: &'a [Vec<f64>],
}

impl ExperimentRecord {
    pub fn new(columns: &[&str]) -> Self {
        ExperimentRecord {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<(), RecordError> {
        let index = self.rows.len();
        if row.len() != self.columns.len() {
            return Err(RecordError::ArityMismatch {
                row: index,
                expected: self.columns.len(),
                got: row.len(),
            });
        }
        if let Some(pos) = row.iter().position(|v| !v.is_finite()) {
            return Err(RecordError::NonFinite { row: index, column: self.columns[pos].clone() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let view = JsonView { columns: &self.columns, rows: &self.rows };
        let mut out = serde_json::to_string(&view).expect("a numeric table always serializes");
        out.push('\n');
        out
    }
}
