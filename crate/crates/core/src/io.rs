//! Reading site matrices and weight lists from delimited text.

use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

/// Rows of a comma- or tab-separated matrix of exact numbers. Blank lines
/// and lines starting with `#` are skipped; with `header` the first
/// remaining line is dropped.
pub fn read_matrix(text: &str, header: bool) -> Result<Vec<Vec<Rational>>> {
    let body: Vec<&str> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .skip(usize::from(header))
        .collect();
    let delimiter = if body.first().is_some_and(|l| l.contains('\t')) { b'\t' } else { b',' };
    let joined = body.join("\n");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(joined.as_bytes());
    let mut rows = Vec::with_capacity(body.len());
    for record in reader.records() {
        let record = record.map_err(|e| Error::Input(format!("malformed matrix: {e}")))?;
        let row = record.iter().map(parse_rational).collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::NoSites);
    }
    Ok(rows)
}

/// Positive integer multiplicities separated by commas, tabs or newlines.
pub fn read_weights(text: &str) -> Result<Vec<u64>> {
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<u64>() {
            Ok(0) | Err(_) => Err(Error::Weights(format!("{s:?} is not a positive integer"))),
            Ok(w) => Ok(w),
        })
        .collect()
}
