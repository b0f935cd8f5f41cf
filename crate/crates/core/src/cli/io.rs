//! Sample and matrix file readers.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::cnd::PointSet;
use crate::independence::PairedSample;

use super::CliError;

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads a CSV with a header row and columns `x0..x{xd−1}`, `y0..y{yd−1}`.
/// Other columns are ignored. Rows are numbered from 1 after the header.
pub fn load_sample(path: &Path, xd: usize, yd: usize) -> Result<PairedSample, CliError> {
    if xd == 0 || yd == 0 {
        return Err(CliError::Usage("--xd and --yd must be at least 1".into()));
    }
    let bytes = read(path)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes.as_slice());
    let headers = reader.headers().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?.clone();
    if headers.iter().all(|h| h.trim().is_empty()) {
        return Err(CliError::EmptyFile(path.display().to_string()));
    }
    let names: Vec<String> = (0..xd).map(|i| format!("x{i}")).chain((0..yd).map(|i| format!("y{i}"))).collect();
    let mut columns = Vec::with_capacity(names.len());
    for name in &names {
        let idx = headers.iter().position(|h| h.trim() == name).ok_or_else(|| CliError::MissingColumn(name.clone()))?;
        columns.push(idx);
    }
    let mut x_rows = Vec::new();
    let mut y_rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let row = r + 1;
        let record = record.map_err(|e| CliError::Io(format!("{}: row {row}: {e}", path.display())))?;
        let mut values = Vec::with_capacity(columns.len());
        for (name, &c) in names.iter().zip(&columns) {
            let cell = record.get(c).unwrap_or("").trim();
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => return Err(CliError::NonNumericCell { row, col: name.clone() }),
            }
        }
        y_rows.push(values.split_off(xd));
        x_rows.push(values);
    }
    if x_rows.is_empty() {
        return Err(CliError::EmptyFile(path.display().to_string()));
    }
    Ok(PairedSample::new(PointSet::euclidean(&x_rows)?, PointSet::euclidean(&y_rows)?)?)
}

/// Reads a matrix with one row per line, entries separated by whitespace or
/// commas. Blank lines and `#` comments are skipped.
pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let text = String::from_utf8(read(path)?).map_err(|_| CliError::Io(format!("{}: not UTF-8", path.display())))?;
    parse_matrix(&text).map_err(|e| match e {
        CliError::Matrix { line, message } => {
            CliError::Matrix { line, message: format!("{}: {message}", path.display()) }
        }
        other => other,
    })
}

pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>, CliError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(CliError::Matrix { line, message: format!("bad entry `{s}`") }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::Matrix {
                    line,
                    message: format!("row has {} entries, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Matrix { line: 0, message: "no rows".into() });
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_row_slice(r, c, &rows.concat()))
}

/// Hex SHA-256 of the concatenated file contents, each prefixed by its length.
pub fn digest_files(paths: &[&Path]) -> Result<String, CliError> {
    let mut hasher = Sha256::new();
    for p in paths {
        let bytes = read(p)?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn digest_bytes(parts: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update((p.len() as u64).to_le_bytes());
        hasher.update(p);
    }
    hex::encode(hasher.finalize())
}
