//! Report emission: delimiter-separated text or line-delimited JSON records.

use anyhow::{Context, Result};
use clap::ValueEnum;
use std::path::PathBuf;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Comma-delimited text with a header row.
    Csv,
    /// One JSON object per data row, keyed by the column names.
    Records,
}

/// Writes `csv` to the path (or standard output), converting to records when
/// asked. Numeric-looking fields become JSON numbers.
pub fn emit(path: &Option<PathBuf>, format: OutputFormat, csv: &str) -> Result<()> {
    let content = match format {
        OutputFormat::Csv => csv.to_string(),
        OutputFormat::Records => csv_to_records(csv),
    };
    match path {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn csv_to_records(csv: &str) -> String {
    let mut lines = csv.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    let columns: Vec<&str> = header.split(',').collect();
    let mut out = String::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let mut record = serde_json::Map::new();
        for (column, field) in columns.iter().zip(line.split(',')) {
            let value = match field.parse::<f64>() {
                Ok(number) if number.is_finite() => serde_json::json!(number),
                _ => serde_json::json!(field),
            };
            record.insert((*column).to_string(), value);
        }
        out.push_str(&serde_json::Value::Object(record).to_string());
        out.push('\n');
    }
    out
}
