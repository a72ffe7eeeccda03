//! File loaders for the command line.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::flow::SolverConfig;
use crate::numerics::{DenseMatrix, SigmaList};
use crate::pattern::{parse_pattern, parse_pattern_json, Pattern};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

pub fn parse_matrix_json(text: &str) -> Result<DenseMatrix> {
    serde_json::from_str(text).map_err(|e| {
        if e.line() > 0 {
            return json_error(e);
        }
        // shape errors surface after the whole object is read
        let body = text.trim_end();
        let line = body.lines().count().max(1);
        let column = body.lines().last().map_or(1, |l| l.chars().count());
        Error::Parse { line, column, message: e.to_string() }
    })
}

/// Reads `{"rows": m, "cols": n, "data": [...]}`.
pub fn load_matrix(path: &Path) -> Result<DenseMatrix> {
    parse_matrix_json(&read(path)?)
}

/// Reads a pattern in either the JSON or the 0/1 text format.
pub fn load_pattern(path: &Path) -> Result<Pattern> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        parse_pattern_json(&text)
    } else {
        parse_pattern(&text)
    }
}

pub fn load_config(path: &Path) -> Result<SolverConfig> {
    let cfg: SolverConfig = serde_json::from_str(&read(path)?).map_err(json_error)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `3,2,1`; returns the list in non-increasing order and whether it was reordered.
pub fn parse_sigmas(text: &str) -> Result<(SigmaList, bool)> {
    let mut values = Vec::new();
    let mut column = 1;
    for item in text.split(',') {
        let v: f64 = item.trim().parse().map_err(|_| Error::Parse {
            line: 1,
            column,
            message: format!("not a number: {:?}", item.trim()),
        })?;
        values.push(v);
        column += item.chars().count() + 1;
    }
    SigmaList::from_unsorted(values)
}

/// Compact JSON form of a matrix, readable by `load_matrix`.
pub fn matrix_to_json(m: &DenseMatrix) -> String {
    serde_json::to_string(m).expect("matrix serializes")
}
