//! Reader and writer for the plain-text "alist" sparse matrix format.
//!
//! ```text
//! n_cols n_rows
//! max_col_degree max_row_degree
//! <column degrees>
//! <row degrees>
//! <one line per column: 1-based row indices, zero-padded to max_col_degree>
//! <one line per row: 1-based column indices, zero-padded to max_row_degree>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::BinMatrix;

fn join_padded(out: &mut String, entries: &[usize], width: usize) {
    let mut first = true;
    for k in 0..width {
        let value = entries.get(k).map_or(0, |&e| e + 1);
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{value}");
    }
    out.push('\n');
}

fn join_plain(out: &mut String, values: impl IntoIterator<Item = usize>) {
    let line: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
    out.push_str(&line.join(" "));
    out.push('\n');
}

/// Serializes `m` in canonical alist form (single spaces, trailing newline).
pub fn to_alist(m: &BinMatrix) -> String {
    let rows = m.row_supports();
    let cols = m.col_supports();
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = rows.iter().map(Vec::len).max().unwrap_or(0);

    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.n_cols(), m.n_rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    join_plain(&mut out, cols.iter().map(Vec::len));
    join_plain(&mut out, rows.iter().map(Vec::len));
    for c in &cols {
        join_padded(&mut out, c, max_col);
    }
    for r in &rows {
        join_padded(&mut out, r, max_row);
    }
    out
}

struct Tokens<'a> {
    inner: Box<dyn Iterator<Item = (usize, &'a str)> + 'a>,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let inner = text
            .lines()
            .enumerate()
            .flat_map(|(n, l)| l.split_whitespace().map(move |t| (n + 1, t)));
        Tokens {
            inner: Box::new(inner),
            line: 1,
        }
    }

    fn next_usize(&mut self, what: &str) -> Result<usize> {
        let (line, tok) = self.inner.next().ok_or_else(|| Error::Parse {
            line: self.line,
            msg: format!("unexpected end of input reading {what}"),
        })?;
        self.line = line;
        tok.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected a non-negative integer for {what}, found {tok:?}"),
        })
    }

    fn err(&self, msg: String) -> Error {
        Error::Parse {
            line: self.line,
            msg,
        }
    }
}

/// Parses alist text. Column and row lists must describe the same matrix.
pub fn from_alist(text: &str) -> Result<BinMatrix> {
    let mut t = Tokens::new(text);
    let n_cols = t.next_usize("column count")?;
    let n_rows = t.next_usize("row count")?;
    let max_col = t.next_usize("max column degree")?;
    let max_row = t.next_usize("max row degree")?;
    let col_deg = (0..n_cols)
        .map(|_| t.next_usize("column degree"))
        .collect::<Result<Vec<_>>>()?;
    let row_deg = (0..n_rows)
        .map(|_| t.next_usize("row degree"))
        .collect::<Result<Vec<_>>>()?;

    let mut read_lists =
        |count: usize, width: usize, degrees: &[usize], bound: usize, what: &str| {
            let mut lists = Vec::with_capacity(count);
            for (k, &deg) in degrees.iter().enumerate() {
                if deg > width {
                    return Err(t.err(format!(
                        "{what} {} has degree {deg} above maximum {width}",
                        k + 1
                    )));
                }
                let mut entries = Vec::with_capacity(deg);
                for slot in 0..width {
                    let v = t.next_usize(what)?;
                    if slot < deg {
                        if v == 0 || v > bound {
                            return Err(t.err(format!(
                                "{what} {} entry {v} out of range 1..={bound}",
                                k + 1
                            )));
                        }
                        entries.push(v - 1);
                    } else if v != 0 {
                        return Err(
                            t.err(format!("{what} {} expected zero padding, found {v}", k + 1))
                        );
                    }
                }
                lists.push(entries);
            }
            Ok(lists)
        };

    let cols = read_lists(n_cols, max_col, &col_deg, n_rows, "column")?;
    let rows = read_lists(n_rows, max_row, &row_deg, n_cols, "row")?;
    if t.inner.next().is_some() {
        return Err(t.err("trailing data after row lists".into()));
    }

    let m = BinMatrix::from_supports(n_cols, &rows)?;
    if m.weight() != row_deg.iter().sum::<usize>() {
        return Err(Error::Parse {
            line: 0,
            msg: "row lists contain duplicate entries".into(),
        });
    }
    let mut sorted_cols: Vec<Vec<usize>> = cols;
    for c in &mut sorted_cols {
        c.sort_unstable();
    }
    if sorted_cols != m.col_supports() {
        return Err(Error::Parse {
            line: 0,
            msg: "column lists disagree with row lists".into(),
        });
    }
    Ok(m)
}

pub fn read_alist(path: impl AsRef<Path>) -> Result<BinMatrix> {
    from_alist(&std::fs::read_to_string(path)?)
}
