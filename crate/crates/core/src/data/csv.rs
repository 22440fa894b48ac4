use std::fs;
use std::io::Write;
use std::path::Path;

use super::BitMatrix;
use crate::{Error, Result};

/// Reads a headerless CSV of comma-separated 0/1 tokens (LF or CRLF).
pub fn load_binary_csv(path: impl AsRef<Path>) -> Result<BitMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_binary_csv(&text)
}

pub fn parse_binary_csv(text: &str) -> Result<BitMatrix> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut lines: Vec<&str> = text.split('\n').collect();
    // A trailing newline leaves one empty tail element.
    if lines.last() == Some(&"") {
        lines.pop();
    }
    for (idx, raw) in lines.iter().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let mut row = Vec::with_capacity(rows.first().map_or(0, Vec::len));
        for token in line.split(',') {
            match token.trim() {
                "0" => row.push(0),
                "1" => row.push(1),
                other => {
                    return Err(Error::MalformedRow {
                        line: line_no,
                        reason: format!("expected 0 or 1, found {other:?}"),
                    })
                }
            }
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::MalformedRow {
                    line: line_no,
                    reason: format!("{} values, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile);
    }
    BitMatrix::from_rows(&rows)
}

pub fn write_binary_csv(data: &BitMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(data.rows() * data.cols() * 2);
    let mut row = vec![0u8; data.cols()];
    for r in 0..data.rows() {
        data.row_into(r, &mut row);
        for (c, v) in row.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            out.push(if *v == 1 { '1' } else { '0' });
        }
        out.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
