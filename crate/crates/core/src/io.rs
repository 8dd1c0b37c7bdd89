//! CSV output shared by all modules: comma separated, header row,
//! 17 significant digits.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Formats a value with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders equal-length columns as CSV text.
pub fn csv_string(headers: &[&str], columns: &[&[f64]]) -> Result<String> {
    if headers.len() != columns.len() {
        return Err(Error::InvalidArgument(format!(
            "{} headers for {} columns",
            headers.len(),
            columns.len()
        )));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidArgument("CSV columns differ in length".into()));
    }
    let mut out = String::with_capacity(rows * columns.len() * 25 + 64);
    out.push_str(&headers.join(","));
    out.push('\n');
    for i in 0..rows {
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(col[i]));
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_csv(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    let text = csv_string(headers, columns)?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`] back into columns.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{}: empty CSV", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != header.len() {
            return Err(Error::Config(format!("{}: line {} has {} fields", path.display(), ln + 2, fields.len())));
        }
        for (c, s) in cols.iter_mut().zip(fields) {
            let v = s.trim().parse::<f64>().map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            c.push(v);
        }
    }
    Ok((header, cols))
}
