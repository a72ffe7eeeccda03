use super::Pattern;
use crate::error::{Error, Result};

/// Parses one row per line of '0'/'1' characters. Spaces and tabs are ignored, as are
/// trailing blank lines.
pub fn parse_pattern(text: &str) -> Result<Pattern> {
    let lines: Vec<&str> = text.lines().collect();
    let used = lines.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |k| k + 1);
    if used == 0 {
        return Err(Error::Parse { line: 1, column: 1, message: "empty pattern".into() });
    }
    let mut rows: Vec<Vec<bool>> = Vec::with_capacity(used);
    for (ln, line) in lines[..used].iter().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let mut row = Vec::new();
        for (col, ch) in line.chars().enumerate() {
            match ch {
                '0' => row.push(false),
                '1' => row.push(true),
                ' ' | '\t' => {}
                _ => {
                    return Err(Error::Parse {
                        line: ln + 1,
                        column: col + 1,
                        message: format!("unexpected character {ch:?}"),
                    })
                }
            }
        }
        if row.is_empty() {
            return Err(Error::Parse { line: ln + 1, column: 1, message: "empty row".into() });
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: ln + 1,
                    column: 1,
                    message: format!("row has {} cells, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    let m = rows.len();
    let n = rows[0].len();
    Pattern::new(m, n, rows.into_iter().flatten().collect())
}

/// One line per row, newline terminated.
pub fn serialize_pattern(p: &Pattern) -> String {
    let mut s = String::with_capacity(p.rows() * (p.cols() + 1));
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            s.push(if p.get(i, j) { '1' } else { '0' });
        }
        s.push('\n');
    }
    s
}

pub fn parse_pattern_json(text: &str) -> Result<Pattern> {
    serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })
}

pub fn serialize_pattern_json(p: &Pattern) -> String {
    serde_json::to_string(p).expect("pattern serializes")
}
