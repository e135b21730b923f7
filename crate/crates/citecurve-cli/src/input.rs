//! Citation-list ingestion: CSV (last column is the count) and JSON arrays.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use serde::Deserialize;

use citecurve::core::CitationList;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Sniff by extension, then by leading byte.
    Auto,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputRecord {
    pub title: Option<String>,
    pub year: Option<i64>,
    pub citations: u64,
}

pub fn parse_input(path: &Path, format: InputFormat) -> Result<Vec<InputRecord>, CliError> {
    match format {
        InputFormat::Csv => parse_csv(path),
        InputFormat::Json => parse_json(path),
        InputFormat::Auto => match sniff_format(path)? {
            InputFormat::Json => parse_json(path),
            _ => parse_csv(path),
        },
    }
}

pub fn to_citation_list(records: &[InputRecord]) -> CitationList {
    CitationList::from_counts(records.iter().map(|r| r.citations).collect())
}

fn sniff_format(path: &Path) -> Result<InputFormat, CliError> {
    if let Some(ext) = path.extension().and_then(|e| e.to_str()) {
        match ext.to_ascii_lowercase().as_str() {
            "csv" => return Ok(InputFormat::Csv),
            "json" => return Ok(InputFormat::Json),
            _ => {}
        }
    }
    let text = read_file(path)?;
    Ok(match text.trim_start().chars().next() {
        Some('[') | Some('{') => InputFormat::Json,
        _ => InputFormat::Csv,
    })
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse_csv(path: &Path) -> Result<Vec<InputRecord>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut records = Vec::new();
    for (index, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_error(path, e))?;
        let line = row.position().map_or(index as u64 + 1, |p| p.line());
        if row.iter().all(|field| field.is_empty()) {
            continue;
        }
        let last = row.get(row.len() - 1).unwrap_or("");
        match last.parse::<i64>() {
            // A non-numeric last field is only a header on the first row.
            Err(_) if index == 0 => continue,
            Err(_) => {
                return Err(CliError::Parse(format!(
                    "{}:{line}: citation count '{last}' is not an integer",
                    path.display()
                )))
            }
            Ok(count) if count < 0 => {
                return Err(CliError::Parse(format!(
                    "{}:{line}: negative citation count {count}",
                    path.display()
                )))
            }
            Ok(count) => {
                // Unquoted commas in a title split it across fields; the
                // trimmed pieces are rejoined with a normal separator.
                let title: String = row
                    .iter()
                    .take(row.len() - 1)
                    .collect::<Vec<_>>()
                    .join(", ");
                records.push(InputRecord {
                    title: if title.is_empty() { None } else { Some(title) },
                    year: None,
                    citations: count as u64,
                });
            }
        }
    }
    Ok(records)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let message = format!("{}: {e}", path.display());
    if e.is_io_error() {
        CliError::Io(message)
    } else {
        CliError::Parse(message)
    }
}

#[derive(Deserialize)]
struct JsonRow {
    citations: i64,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    year: Option<i64>,
}

fn parse_json(path: &Path) -> Result<Vec<InputRecord>, CliError> {
    let text = read_file(path)?;
    let rows: Vec<JsonRow> = serde_json::from_str(&text).map_err(|e| {
        CliError::Parse(format!("{}: invalid JSON input: {e}", path.display()))
    })?;
    rows.into_iter()
        .enumerate()
        .map(|(index, row)| {
            if row.citations < 0 {
                return Err(CliError::Parse(format!(
                    "{}: record {}: negative citation count {}",
                    path.display(),
                    index + 1,
                    row.citations
                )));
            }
            Ok(InputRecord {
                title: row.title,
                year: row.year,
                citations: row.citations as u64,
            })
        })
        .collect()
}
