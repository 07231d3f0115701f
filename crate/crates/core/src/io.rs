//! Plain-text matrix and population files.
//!
//! Matrix file: `K` lines of `K` comma-separated probabilities, row = true
//! class. Blank lines and lines starting with `#` are ignored.
//!
//! Population file: one group per entry, either a reference line
//! `<proportion>,<matrix-file>` (paths relative to the population file) or an
//! inline block: a line holding only `<proportion>` followed by the `K`
//! matrix rows.

use crate::model::{MatrixOptions, ModelError, TransitionMatrix, VoterPopulation};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_row(line: &str) -> Option<Vec<f64>> {
    line.split(',').map(|f| f.trim().parse::<f64>().ok()).collect()
}

pub fn parse_matrix(text: &str, origin: &str, opts: &MatrixOptions) -> Result<TransitionMatrix, IoError> {
    let mut rows = Vec::new();
    for (n, line) in content_lines(text) {
        let row = parse_row(line).ok_or_else(|| IoError::Parse {
            path: origin.to_string(),
            line: n,
            message: format!("expected comma-separated numbers, got `{line}`"),
        })?;
        rows.push(row);
    }
    TransitionMatrix::from_rows(&rows, opts).map_err(|source| IoError::Model {
        path: origin.to_string(),
        source,
    })
}

pub fn read_matrix(path: &Path, opts: &MatrixOptions) -> Result<TransitionMatrix, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text, &path.display().to_string(), opts)
}

/// Serialize with shortest round-trip decimals, so reloading is exact.
pub fn format_matrix(matrix: &TransitionMatrix) -> String {
    let mut out = String::new();
    for row in matrix.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        let _ = writeln!(out, "{}", fields.join(","));
    }
    out
}

enum Entry {
    Reference(f64, PathBuf),
    Inline(f64, Vec<Vec<f64>>, usize),
}

pub fn parse_population(
    text: &str,
    origin: &str,
    base_dir: &Path,
    opts: &MatrixOptions,
) -> Result<VoterPopulation, IoError> {
    let parse_err = |line: usize, message: String| IoError::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut entries: Vec<Entry> = Vec::new();
    for (n, line) in content_lines(text) {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let numeric: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
        match numeric {
            Some(values) if values.len() == 1 => entries.push(Entry::Inline(values[0], Vec::new(), n)),
            Some(values) => match entries.last_mut() {
                Some(Entry::Inline(_, rows, _)) => rows.push(values),
                _ => return Err(parse_err(n, "matrix row outside an inline group".into())),
            },
            None if fields.len() == 2 => {
                let r = fields[0]
                    .parse::<f64>()
                    .map_err(|_| parse_err(n, format!("bad proportion `{}`", fields[0])))?;
                entries.push(Entry::Reference(r, base_dir.join(fields[1])));
            }
            None => {
                return Err(parse_err(
                    n,
                    format!("expected `<proportion>,<matrix-file>`, a proportion, or a matrix row; got `{line}`"),
                ))
            }
        }
    }
    let mut specs = Vec::with_capacity(entries.len());
    for entry in entries {
        match entry {
            Entry::Reference(r, path) => specs.push((r, read_matrix(&path, opts)?)),
            Entry::Inline(r, rows, n) => {
                let m = TransitionMatrix::from_rows(&rows, opts).map_err(|source| IoError::Model {
                    path: format!("{origin}:{n}"),
                    source,
                })?;
                specs.push((r, m));
            }
        }
    }
    VoterPopulation::new(specs).map_err(|source| IoError::Model {
        path: origin.to_string(),
        source,
    })
}

pub fn read_population(path: &Path, opts: &MatrixOptions) -> Result<VoterPopulation, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_population(&text, &path.display().to_string(), base, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments() {
        let text = "# two classes\n0.8, 0.2\n\n0.3,0.7\n";
        let m = parse_matrix(text, "mem", &MatrixOptions::default()).unwrap();
        assert_eq!(m.get(1, 0), 0.3);
    }

    #[test]
    fn bad_token_is_located() {
        let err = parse_matrix("0.5,x\n0.5,0.5\n", "m.csv", &MatrixOptions::default()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }));
    }

    #[test]
    fn row_sum_error_names_row() {
        let err = parse_matrix("0.6,0.6\n0.5,0.5\n", "bad.csv", &MatrixOptions::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 0") && msg.contains("1.2"), "{msg}");
    }

    #[test]
    fn format_round_trips_exactly() {
        let m = TransitionMatrix::dawid_skene(7, 0.37).unwrap();
        let back = parse_matrix(&format_matrix(&m), "mem", &MatrixOptions::default()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn inline_and_referenced_groups() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "0.9,0.1\n0.1,0.9\n").unwrap();
        let text = "# mixed\n0.5,a.csv\n0.5\n0.6,0.4\n0.4,0.6\n";
        let pop = parse_population(text, "pop", dir.path(), &MatrixOptions::default()).unwrap();
        assert_eq!(pop.group_count(), 2);
        assert_eq!(pop.groups()[0].matrix.get(0, 0), 0.9);
        assert_eq!(pop.groups()[1].matrix.get(1, 0), 0.4);
    }

    #[test]
    fn stray_row_rejected() {
        let err = parse_population("0.5,0.5\n", "pop", Path::new("."), &MatrixOptions::default()).unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }));
    }
}
