//! Matrix Market coordinate file reading and writing.
//!
//! Supported kind: `matrix coordinate real general` with 1-based indices.
//! Reading tolerates arbitrary entry order and duplicate cells
//! (canonicalized, duplicates summed, exact-zero sums dropped) and skips
//! `%` comment lines and blank lines. Writing emits entries in row-major
//! canonical order with shortest round-trip decimal floats, so equal
//! matrices produce byte-identical files.

use csrpoly_core::{CsrMatrix, Error as CoreError};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug)]
pub enum MmError {
    /// Malformed header, size line, or entry line.
    Parse { line: usize, message: String },
    /// Structurally valid Matrix Market content of a kind this reader does
    /// not handle (pattern/integer/complex fields, symmetric storage, ...).
    Unsupported { line: usize, message: String },
    /// An entry lies outside the declared shape.
    Index { line: usize, message: String },
    Io(io::Error),
    /// Canonicalization of the parsed triplets failed.
    Matrix(CoreError),
}

impl fmt::Display for MmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MmError::Parse { line, message } => write!(f, "line {line}: {message}"),
            MmError::Unsupported { line, message } => {
                write!(f, "line {line}: unsupported: {message}")
            }
            MmError::Index { line, message } => write!(f, "line {line}: {message}"),
            MmError::Io(e) => write!(f, "io error: {e}"),
            MmError::Matrix(e) => write!(f, "invalid matrix data: {e}"),
        }
    }
}

impl std::error::Error for MmError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            MmError::Io(e) => Some(e),
            MmError::Matrix(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for MmError {
    fn from(e: io::Error) -> Self {
        MmError::Io(e)
    }
}

/// Reads a `matrix coordinate real general` file into canonical CSR.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix, MmError> {
    read_from(BufReader::new(File::open(path)?))
}

/// Writes `m` in Matrix Market coordinate form.
pub fn write_matrix_market(m: &CsrMatrix, path: impl AsRef<Path>) -> Result<(), MmError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_to(m, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Reader-generic form of [`read_matrix_market`].
pub fn read_from<R: BufRead>(reader: R) -> Result<CsrMatrix, MmError> {
    let mut lines = reader.lines().enumerate();

    let (idx, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file, expected a Matrix Market banner"))?;
    let header = header?;
    check_header(idx + 1, &header)?;

    let (size_line_no, size_line) = next_data_line(&mut lines)?
        .ok_or_else(|| parse_err(idx + 2, "missing size line"))?;
    let (n_rows, n_cols, nnz) = parse_size_line(size_line_no, &size_line)?;

    let mut triplets = Vec::with_capacity(nnz);
    while triplets.len() < nnz {
        let (line_no, line) = next_data_line(&mut lines)?.ok_or_else(|| {
            parse_err(
                size_line_no,
                &format!("declared {nnz} entries but the file ends after {}", triplets.len()),
            )
        })?;
        triplets.push(parse_entry(line_no, &line, n_rows, n_cols)?);
    }
    if let Some((line_no, _)) = next_data_line(&mut lines)? {
        return Err(parse_err(
            line_no,
            &format!("data after the {nnz} declared entries"),
        ));
    }

    CsrMatrix::from_triplets(n_rows, n_cols, &triplets).map_err(MmError::Matrix)
}

/// Writer-generic form of [`write_matrix_market`].
pub fn write_to<W: Write>(m: &CsrMatrix, w: &mut W) -> Result<(), MmError> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for i in 0..m.n_rows() {
        let (cols, vals) = m.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {}", i + 1, c + 1, v)?;
        }
    }
    Ok(())
}

fn parse_err(line: usize, message: &str) -> MmError {
    MmError::Parse {
        line,
        message: message.to_string(),
    }
}

fn check_header(line: usize, header: &str) -> Result<(), MmError> {
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("%%MatrixMarket") {
        return Err(parse_err(line, "expected a %%MatrixMarket banner"));
    }
    let mut field = |name: &str| {
        tokens
            .next()
            .map(|t| t.to_ascii_lowercase())
            .ok_or_else(|| parse_err(line, &format!("banner is missing the {name} token")))
    };
    let unsupported = |what: String| MmError::Unsupported {
        line,
        message: what,
    };

    let object = field("object")?;
    if object != "matrix" {
        return Err(unsupported(format!("object \"{object}\", only matrix")));
    }
    let format = field("format")?;
    match format.as_str() {
        "coordinate" => {}
        "array" => return Err(unsupported("array format, only coordinate".into())),
        other => return Err(parse_err(line, &format!("unknown format \"{other}\""))),
    }
    let value_field = field("field")?;
    match value_field.as_str() {
        "real" => {}
        "integer" | "complex" | "pattern" => {
            return Err(unsupported(format!("field \"{value_field}\", only real")))
        }
        other => return Err(parse_err(line, &format!("unknown field \"{other}\""))),
    }
    let symmetry = field("symmetry")?;
    match symmetry.as_str() {
        "general" => {}
        "symmetric" | "skew-symmetric" | "hermitian" => {
            return Err(unsupported(format!(
                "symmetry \"{symmetry}\", only general"
            )))
        }
        other => return Err(parse_err(line, &format!("unknown symmetry \"{other}\""))),
    }
    Ok(())
}

type NumberedLines<'a, R> = &'a mut std::iter::Enumerate<io::Lines<R>>;

/// Next line that is neither blank nor a `%` comment, with its 1-based
/// number.
fn next_data_line<R: BufRead>(lines: NumberedLines<R>) -> Result<Option<(usize, String)>, MmError> {
    for (idx, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        return Ok(Some((idx + 1, line)));
    }
    Ok(None)
}

fn parse_size_line(line_no: usize, line: &str) -> Result<(usize, usize, usize), MmError> {
    let mut tokens = line.split_whitespace();
    let mut dim = |name: &str| -> Result<usize, MmError> {
        tokens
            .next()
            .ok_or_else(|| parse_err(line_no, &format!("size line is missing {name}")))?
            .parse()
            .map_err(|_| parse_err(line_no, &format!("size line has a malformed {name}")))
    };
    let n_rows = dim("n_rows")?;
    let n_cols = dim("n_cols")?;
    let nnz = dim("nnz")?;
    if tokens.next().is_some() {
        return Err(parse_err(line_no, "size line has trailing tokens"));
    }
    Ok((n_rows, n_cols, nnz))
}

fn parse_entry(
    line_no: usize,
    line: &str,
    n_rows: usize,
    n_cols: usize,
) -> Result<(usize, usize, f64), MmError> {
    let mut tokens = line.split_whitespace();
    let mut token = |name: &str| {
        tokens
            .next()
            .ok_or_else(|| parse_err(line_no, &format!("entry is missing {name}")))
    };
    let row: usize = token("a row index")?
        .parse()
        .map_err(|_| parse_err(line_no, "malformed row index"))?;
    let col: usize = token("a column index")?
        .parse()
        .map_err(|_| parse_err(line_no, "malformed column index"))?;
    let value: f64 = token("a value")?
        .parse()
        .map_err(|_| parse_err(line_no, "malformed value"))?;
    if tokens.next().is_some() {
        return Err(parse_err(line_no, "entry has trailing tokens"));
    }
    if row == 0 || row > n_rows || col == 0 || col > n_cols {
        return Err(MmError::Index {
            line: line_no,
            message: format!(
                "entry ({row}, {col}) outside the declared {n_rows} x {n_cols} shape (indices are 1-based)"
            ),
        });
    }
    Ok((row - 1, col - 1, value))
}
