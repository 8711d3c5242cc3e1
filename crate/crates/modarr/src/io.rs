//! Plain-text matrix files.
//!
//! ```text
//! # comment
//! 2 3
//! 1 1 -2
//! -1 1 1
//! ```
//!
//! The first non-comment line holds `m n`; the next `m` lines hold one row
//! each. Blank lines and `#` comments are ignored everywhere.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a matrix from text.
pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_error(1, "missing header"))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_error(header_line, "header must be `m n`"));
    }
    let dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| parse_error(header_line, format!("invalid dimension `{s}`")))
    };
    let (m, n) = (dim(dims[0])?, dim(dims[1])?);
    if m == 0 || n == 0 {
        return Err(Error::EmptyMatrix);
    }

    let mut entries = Vec::with_capacity(m * n);
    let mut last_line = header_line;
    for _ in 0..m {
        let (line, row) = lines
            .next()
            .ok_or_else(|| parse_error(last_line + 1, format!("expected {m} rows")))?;
        last_line = line;
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != n {
            return Err(parse_error(
                line,
                format!("expected {n} entries, found {}", tokens.len()),
            ));
        }
        for t in tokens {
            let v = BigInt::from_str(t)
                .map_err(|_| parse_error(line, format!("invalid integer `{t}`")))?;
            entries.push(v);
        }
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_error(line, "unexpected content after the last row"));
    }
    IntMatrix::from_entries(m, n, entries)
}

/// Reads and parses a matrix file.
pub fn read_matrix(path: &Path) -> Result<IntMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

/// Canonical text form: header then rows, single spaces, trailing newline.
pub fn canonical_text(c: &IntMatrix) -> String {
    let mut out = format!("{} {}\n", c.rows(), c.cols());
    for i in 0..c.rows() {
        let row: Vec<String> = c.row(i).iter().map(ToString::to_string).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_blanks() {
        let text = "# worked example\n\n2 3\n1 1 -2  # first row\n\n-1 1 1\n";
        let c = parse_matrix(text).unwrap();
        assert_eq!(c, IntMatrix::from_rows(&[[1, 1, -2], [-1, 1, 1]]));
        assert_eq!(canonical_text(&c), "2 3\n1 1 -2\n-1 1 1\n");
        assert_eq!(parse_matrix(&canonical_text(&c)).unwrap(), c);
    }

    #[test]
    fn big_entries() {
        let c = parse_matrix("1 1\n123456789012345678901234567890\n").unwrap();
        assert_eq!(c[(0, 0)].to_string(), "123456789012345678901234567890");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line = |t: &str| match parse_matrix(t) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line(""), 1);
        assert_eq!(line("2\n"), 1);
        assert_eq!(line("2 2\n1 2\n3\n"), 3);
        assert_eq!(line("2 2\n1 x\n3 4\n"), 2);
        assert_eq!(line("1 2\n1 2\n5 6\n"), 3);
        assert_eq!(line("2 2\n1 2\n"), 3);
        assert!(matches!(parse_matrix("0 3\n"), Err(Error::EmptyMatrix)));
    }
}
