//! CSV datasets: a header row, a `label` column holding `+1`/`-1`, then one
//! column per feature. Sample files use the same layout; their `label` column
//! is optional.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::classical::{Dataset, Label};
use crate::error::{Error, Result};
use crate::numerics::RealMatrix;

pub const LABEL_COLUMN: &str = "label";

/// Parsed rows with the 1-based line numbers they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub features: Vec<String>,
    pub labels: Option<Vec<Label>>,
    pub rows: Vec<Vec<f64>>,
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
    match err.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse { line, message: format!("{other:?}") },
    }
}

fn parse_label(field: &str, line: usize) -> Result<Label> {
    match field.parse::<f64>() {
        Ok(1.0) => Ok(Label::Positive),
        Ok(-1.0) => Ok(Label::Negative),
        _ => Err(Error::Parse { line, message: format!("label must be +1 or -1, got `{field}`") }),
    }
}

/// Parses a table; `require_label` rejects files without a `label` column.
pub fn parse_table(reader: impl Read, require_label: bool) -> Result<Table> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = csv.headers().map_err(csv_error)?.clone();
    let label_at = headers.iter().position(|h| h == LABEL_COLUMN);
    match label_at {
        Some(0) | None => {}
        Some(_) => return Err(Error::Parse { line: 1, message: "`label` must be the first column".into() }),
    }
    if require_label && label_at.is_none() {
        return Err(Error::Parse { line: 1, message: "missing `label` column".into() });
    }
    let features: Vec<String> = headers.iter().skip(usize::from(label_at.is_some())).map(str::to_string).collect();
    if features.is_empty() {
        return Err(Error::Parse { line: 1, message: "no feature columns".into() });
    }
    let mut labels = label_at.map(|_| Vec::new());
    let mut rows = Vec::new();
    for record in csv.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let mut fields = record.iter();
        if let Some(labels) = labels.as_mut() {
            labels.push(parse_label(fields.next().unwrap_or(""), line)?);
        }
        let row = fields
            .map(|f| match f.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse { line, message: format!("`{f}` is not a finite number") }),
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 2, message: "no data rows".into() });
    }
    Ok(Table { features, labels, rows })
}

pub fn dataset_from_table(table: &Table) -> Result<Dataset> {
    let labels = table.labels.as_ref().ok_or(Error::Parse { line: 1, message: "missing `label` column".into() })?;
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for (label, row) in labels.iter().zip(&table.rows) {
        match label {
            Label::Positive => positive.push(row.clone()),
            Label::Negative => negative.push(row.clone()),
        }
    }
    if positive.is_empty() || negative.is_empty() {
        return Err(Error::InvalidMatrix("both classes need at least one sample".into()));
    }
    Dataset::new(RealMatrix::from_rows(&positive)?, RealMatrix::from_rows(&negative)?)
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    dataset_from_table(&parse_table(File::open(path)?, true)?)
}

pub fn read_samples(path: &Path) -> Result<Table> {
    parse_table(File::open(path)?, false)
}

/// Writes positives then negatives with columns `label,x0,...`.
pub fn write_dataset(writer: impl Write, data: &Dataset) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    let mut header = vec![LABEL_COLUMN.to_string()];
    header.extend((0..data.n()).map(|i| format!("x{i}")));
    csv.write_record(&header).map_err(csv_error)?;
    for (label, row) in data.labeled_rows() {
        let mut record = vec![format!("{:+}", label.as_i8())];
        record.extend(row.iter().map(|v| v.to_string()));
        csv.write_record(&record).map_err(csv_error)?;
    }
    csv.flush()?;
    Ok(())
}

/// SHA-256 over the dimensions and the little-endian bytes of every entry.
pub fn dataset_fingerprint(data: &Dataset) -> String {
    let mut hasher = Sha256::new();
    for count in [data.n(), data.m1(), data.m2()] {
        hasher.update((count as u64).to_le_bytes());
    }
    for (label, row) in data.labeled_rows() {
        hasher.update([label.as_i8() as u8]);
        for v in row {
            hasher.update(v.to_le_bytes());
        }
    }
    hex::encode(hasher.finalize())
}
