//! Report assembly: every run produces one JSON document plus a CSV
//! rendering of its tabular payload, written to stdout or a file.
//!
//! Reports contain no timestamps or timing data, so identical runs emit
//! byte-identical files.

use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;
use serde_json::Value;

/// Report file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A finished run: the JSON document and the equivalent CSV table.
pub struct Report {
    pub json: Value,
    pub csv_header: Vec<&'static str>,
    pub csv_rows: Vec<Vec<String>>,
}

/// Renders a real with 17 significant digits so binary64 values round-trip.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_text(header: &[&'static str], rows: &[Vec<String>]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().context("flush csv buffer")?;
    String::from_utf8(bytes).context("csv output must be utf-8")
}

/// Writes the report in the chosen format to `out`, or to stdout when no
/// output path was given.
pub fn emit(report: &Report, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report.json)? + "\n",
        Format::Csv => csv_text(&report.csv_header, &report.csv_rows)?,
    };
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("write report to {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
