//! Text formats for line datasets and test points.
//!
//! A dataset file is whitespace-delimited. Lines starting with `#` are
//! comments. The first data row is a header `m sigma_n`; every following
//! row is one measurement with `2m + 1` columns: the start point
//! `p[0..m)`, the span `w[0..m)`, and the observation `y`.
//!
//! A points file has one test input per row, `m` columns each, with the
//! same comment rule and no header.

use std::error::Error;
use std::fmt;
use std::fs;
use std::path::Path;

use linecov::gp::LineDataset;
use linecov::kernel::Line;

#[derive(Debug)]
pub enum DatasetError {
    Io(std::io::Error),
    Parse { line: usize, what: String },
    Invalid(linecov::Error),
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::Io(e) => write!(f, "io error: {e}"),
            DatasetError::Parse { line, what } => write!(f, "line {line}: {what}"),
            DatasetError::Invalid(e) => write!(f, "invalid dataset: {e}"),
        }
    }
}

impl Error for DatasetError {}

impl From<std::io::Error> for DatasetError {
    fn from(e: std::io::Error) -> Self {
        DatasetError::Io(e)
    }
}

impl From<linecov::Error> for DatasetError {
    fn from(e: linecov::Error) -> Self {
        DatasetError::Invalid(e)
    }
}

fn data_rows(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_fields(line_no: usize, row: &str) -> Result<Vec<f64>, DatasetError> {
    row.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>().map_err(|_| DatasetError::Parse {
                line: line_no,
                what: format!("cannot parse `{tok}` as a number"),
            })
        })
        .collect()
}

/// Read a line dataset from the delimited text format.
pub fn read_line_dataset(path: &Path) -> Result<LineDataset, DatasetError> {
    let text = fs::read_to_string(path)?;
    let mut rows = data_rows(&text);

    let (header_no, header) = rows.next().ok_or(DatasetError::Parse {
        line: 0,
        what: "empty dataset: expected a `m sigma_n` header row".to_string(),
    })?;
    let header = parse_fields(header_no, header)?;
    if header.len() != 2 || header[0] < 1.0 || header[0].fract() != 0.0 {
        return Err(DatasetError::Parse {
            line: header_no,
            what: "header must be `m sigma_n` with integral m >= 1".to_string(),
        });
    }
    let m = header[0] as usize;
    let sigma_n = header[1];

    let mut lines = Vec::new();
    let mut observations = Vec::new();
    for (line_no, row) in rows {
        let fields = parse_fields(line_no, row)?;
        if fields.len() != 2 * m + 1 {
            return Err(DatasetError::Parse {
                line: line_no,
                what: format!("expected {} columns, found {}", 2 * m + 1, fields.len()),
            });
        }
        lines.push(Line::new(fields[..m].to_vec(), fields[m..2 * m].to_vec())?);
        observations.push(fields[2 * m]);
    }
    Ok(LineDataset::new(lines, observations, sigma_n)?)
}

/// Read test points, `dim` columns per row.
pub fn read_points(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>, DatasetError> {
    let text = fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (line_no, row) in data_rows(&text) {
        let fields = parse_fields(line_no, row)?;
        if fields.len() != dim {
            return Err(DatasetError::Parse {
                line: line_no,
                what: format!("expected {dim} columns, found {}", fields.len()),
            });
        }
        points.push(fields);
    }
    Ok(points)
}
