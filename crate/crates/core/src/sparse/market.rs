//! Matrix Market coordinate (sparse) and array (dense) formats.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex;

use super::{SparseMatrix, Symmetry};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

struct Header {
    layout: Layout,
    field: Field,
    symmetry: Symmetry,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_header(line: &str, lineno: usize) -> Result<Header> {
    let toks: Vec<String> = line.split_whitespace().map(|t| t.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" {
        return Err(parse_err(lineno, "expected '%%MatrixMarket matrix <layout> <field> <symmetry>'"));
    }
    if toks[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!("object '{}'", toks[1])));
    }
    let layout = match toks[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(Error::UnsupportedFormat(format!("layout '{other}'"))),
    };
    let field = match toks[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(Error::UnsupportedFormat(format!("field '{other}'"))),
    };
    let symmetry = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(Error::UnsupportedFormat(format!("symmetry '{other}'"))),
    };
    if field == Field::Pattern && layout == Layout::Array {
        return Err(Error::UnsupportedFormat("pattern field in array layout".into()));
    }
    Ok(Header { layout, field, symmetry })
}

fn parse_num<T: Real>(tok: Option<&str>, lineno: usize) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(lineno, "missing value"))?;
    let v: f64 = tok.parse().map_err(|_| parse_err(lineno, format!("bad number '{tok}'")))?;
    if !v.is_finite() {
        return Err(parse_err(lineno, "non-finite value"));
    }
    Ok(T::of(v))
}

fn parse_index(tok: Option<&str>, bound: usize, lineno: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(lineno, "missing index"))?;
    let i: usize = tok.parse().map_err(|_| parse_err(lineno, format!("bad index '{tok}'")))?;
    if i == 0 || i > bound {
        return Err(parse_err(lineno, format!("index {i} outside 1..={bound}")));
    }
    Ok(i - 1)
}

fn parse_value<'a, T: Real>(field: Field, toks: &mut impl Iterator<Item = &'a str>, lineno: usize) -> Result<Complex<T>> {
    Ok(match field {
        Field::Pattern => Complex::new(T::one(), T::zero()),
        Field::Real | Field::Integer => Complex::new(parse_num(toks.next(), lineno)?, T::zero()),
        Field::Complex => {
            let re = parse_num(toks.next(), lineno)?;
            let im = parse_num(toks.next(), lineno)?;
            Complex::new(re, im)
        }
    })
}

/// Mirror of an off-diagonal entry under the declared symmetry.
fn mirror<T: Real>(sym: Symmetry, v: Complex<T>) -> Complex<T> {
    match sym {
        Symmetry::General | Symmetry::Symmetric => v,
        Symmetry::Hermitian => v.conj(),
        Symmetry::SkewSymmetric => -v,
    }
}

/// Non-comment lines after the header, paired with their 1-based line
/// numbers in the file.
fn content_lines(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(k, l)| match l {
        Err(e) => Some(Err(Error::Io(e))),
        Ok(s) => {
            let t = s.trim();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok((k + 2, t.to_string())))
            }
        }
    })
}

fn read_header(reader: &mut impl BufRead) -> Result<Header> {
    let mut first = String::new();
    reader.read_line(&mut first)?;
    parse_header(first.trim(), 1)
}

/// Reads a coordinate-format file into an expanded sparse matrix.
pub fn read_matrix_market<T: Real>(path: impl AsRef<Path>) -> Result<SparseMatrix<T>> {
    let mut reader = BufReader::new(File::open(path)?);
    let header = read_header(&mut reader)?;
    if header.layout == Layout::Array {
        return Err(Error::UnsupportedFormat("array layout (expected coordinate)".into()));
    }
    parse_coordinate(header, reader)
}

fn parse_coordinate<T: Real>(header: Header, reader: impl BufRead) -> Result<SparseMatrix<T>> {
    let mut lines = content_lines(reader);
    let (lineno, size) = lines.next().ok_or_else(|| parse_err(1, "missing size line"))??;
    let mut st = size.split_whitespace();
    let dims: Vec<usize> = (0..3)
        .map(|_| st.next().and_then(|t| t.parse().ok()).ok_or_else(|| parse_err(lineno, "expected 'rows cols nnz'")))
        .collect::<Result<_>>()?;
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    if header.symmetry != Symmetry::General && rows != cols {
        return Err(parse_err(lineno, "symmetric storage requires a square matrix"));
    }
    let mut triplets = Vec::with_capacity(if header.symmetry == Symmetry::General { nnz } else { 2 * nnz });
    let mut seen = 0usize;
    for item in lines {
        let (lineno, line) = item?;
        if seen == nnz {
            return Err(parse_err(lineno, "more entries than declared"));
        }
        let mut toks = line.split_whitespace();
        let i = parse_index(toks.next(), rows, lineno)?;
        let j = parse_index(toks.next(), cols, lineno)?;
        let v = parse_value(header.field, &mut toks, lineno)?;
        triplets.push((i, j, v));
        if i != j && header.symmetry != Symmetry::General {
            triplets.push((j, i, mirror(header.symmetry, v)));
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(parse_err(0, format!("declared {nnz} entries, found {seen}")));
    }
    Ok(SparseMatrix::from_triplets(rows, cols, &triplets)?.with_symmetry(header.symmetry))
}

/// Reads either layout into a dense matrix (used for initial-guess blocks).
pub fn read_matrix_market_dense<T: Real>(path: impl AsRef<Path>) -> Result<DenseMatrix<T>> {
    let mut reader = BufReader::new(File::open(path)?);
    let header = read_header(&mut reader)?;
    if header.layout == Layout::Coordinate {
        return Ok(parse_coordinate::<T>(header, reader)?.to_dense());
    }
    let mut lines = content_lines(reader);
    let (lineno, size) = lines.next().ok_or_else(|| parse_err(1, "missing size line"))??;
    let mut st = size.split_whitespace();
    let mut dim = || st.next().and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| parse_err(lineno, "expected 'rows cols'"));
    let (rows, cols) = (dim()?, dim()?);
    if header.symmetry != Symmetry::General && rows != cols {
        return Err(parse_err(lineno, "symmetric storage requires a square matrix"));
    }
    let mut m = DenseMatrix::zeros(rows, cols);
    // Array storage lists the lower triangle only for symmetric variants.
    let positions: Vec<(usize, usize)> = (0..cols)
        .flat_map(|j| {
            let start = if header.symmetry == Symmetry::General {
                0
            } else if header.symmetry == Symmetry::SkewSymmetric {
                j + 1
            } else {
                j
            };
            (start..rows).map(move |i| (i, j))
        })
        .collect();
    let mut k = 0;
    for item in lines {
        let (lineno, line) = item?;
        let &(i, j) = positions.get(k).ok_or_else(|| parse_err(lineno, "more entries than declared"))?;
        let mut toks = line.split_whitespace();
        let v = parse_value(header.field, &mut toks, lineno)?;
        m[(i, j)] = v;
        if i != j && header.symmetry != Symmetry::General {
            m[(j, i)] = mirror(header.symmetry, v);
        }
        k += 1;
    }
    if k != positions.len() {
        return Err(parse_err(0, format!("declared {} entries, found {k}", positions.len())));
    }
    Ok(m)
}

fn field_name<T: Real>(real: bool) -> &'static str {
    if real {
        "real"
    } else {
        "complex"
    }
}

fn write_value<T: Real>(w: &mut impl Write, v: Complex<T>, real: bool) -> std::io::Result<()> {
    if real {
        write!(w, "{:e}", v.re)
    } else {
        write!(w, "{:e} {:e}", v.re, v.im)
    }
}

/// Writes all stored entries in `general` coordinate format. Values use the
/// shortest round-trip representation, so a write/read cycle is lossless.
pub fn write_matrix_market<T: Real>(path: impl AsRef<Path>, m: &SparseMatrix<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let real = m.is_real();
    writeln!(w, "%%MatrixMarket matrix coordinate {} general", field_name::<T>(real))?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for (i, j, v) in m.triplets() {
        write!(w, "{} {} ", i + 1, j + 1)?;
        write_value(&mut w, v, real)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a dense block in `general` array format (column-major).
pub fn write_matrix_market_dense<T: Real>(path: impl AsRef<Path>, m: &DenseMatrix<T>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let real = m.is_real();
    writeln!(w, "%%MatrixMarket matrix array {} general", field_name::<T>(real))?;
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for &v in m.data() {
        write_value(&mut w, if real { Complex::new(v.re, T::zero()) } else { v }, real)?;
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

