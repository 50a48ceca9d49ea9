//! Matrix Market reading and writing, plus a line format for polynomial
//! matrices.
//!
//! Matrix Market files may be `coordinate` or `array`, `integer` or `real`,
//! `general` or `symmetric`. Symmetric storage is expanded on read. The
//! writer always emits `coordinate ... general` with 1-based indices sorted
//! by column, then row. Rational matrices use the `real` field and write
//! values as `p/q`; the reader accepts `p/q`, integers and decimals for them.
//!
//! The polynomial format has `%` comments, a size line `rows cols nnz`, and
//! one line `i j c0 c1 ... ck` per nonzero entry (1-based indices,
//! coefficients from the constant term up).

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::domain::{BigRational, Float64Field, IntPoly, IntegerRing, PolyRing, RationalField, Ring};
use crate::error::{Error, Result};
use crate::quad::QuadMatrix;

/// Domains with a Matrix Market representation.
pub trait MarketDomain: Ring {
    /// Value of the field token in the header written for this domain.
    const FIELD: &'static str;

    fn parse_value(&self, token: &str) -> Option<Self::Elem>;
    fn format_value(&self, v: &Self::Elem) -> String;
}

impl MarketDomain for IntegerRing {
    const FIELD: &'static str = "integer";

    fn parse_value(&self, token: &str) -> Option<BigInt> {
        BigInt::from_str(token.strip_prefix('+').unwrap_or(token)).ok()
    }

    fn format_value(&self, v: &BigInt) -> String {
        v.to_string()
    }
}

impl MarketDomain for RationalField {
    const FIELD: &'static str = "real";

    fn parse_value(&self, token: &str) -> Option<BigRational> {
        if let Some((n, d)) = token.split_once('/') {
            let n = IntegerRing.parse_value(n)?;
            let d = IntegerRing.parse_value(d)?;
            if d.is_zero() {
                return None;
            }
            return Some(BigRational::new(n, d));
        }
        parse_decimal(token)
    }

    fn format_value(&self, v: &BigRational) -> String {
        v.to_string()
    }
}

impl MarketDomain for Float64Field {
    const FIELD: &'static str = "real";

    fn parse_value(&self, token: &str) -> Option<f64> {
        token.parse::<f64>().ok().filter(|v| v.is_finite())
    }

    fn format_value(&self, v: &f64) -> String {
        v.to_string()
    }
}

/// Exact value of a decimal literal such as `-1.25e-3`.
fn parse_decimal(token: &str) -> Option<BigRational> {
    let (mantissa, exp) = match token.find(['e', 'E']) {
        Some(k) => (&token[..k], token[k + 1..].parse::<i32>().ok()?),
        None => (token, 0),
    };
    let (neg, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int}{frac}");
    let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?;
    if neg {
        num = -num;
    }
    let shift = exp - frac.len() as i32;
    let pow = BigInt::from(10).pow(shift.unsigned_abs());
    Some(if shift >= 0 {
        BigRational::from_integer(num * pow)
    } else {
        BigRational::new(num, pow)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('%'))
}

fn parse_index(tok: Option<&str>, line: usize, what: &str, limit: usize) -> Result<usize> {
    let v: usize = tok
        .ok_or_else(|| parse_err(line, format!("missing {what} index")))?
        .parse()
        .map_err(|_| parse_err(line, format!("bad {what} index")))?;
    if v == 0 || v > limit {
        return Err(parse_err(line, format!("{what} index {v} outside 1..={limit}")));
    }
    Ok(v - 1)
}

/// Parses Matrix Market text.
pub fn parse_matrix_market<D: MarketDomain>(dom: D, text: &str, leaf_order: usize) -> Result<QuadMatrix<D>> {
    let first = text.lines().next().ok_or_else(|| parse_err(1, "empty file"))?;
    let head: Vec<String> = first.split_whitespace().map(str::to_ascii_lowercase).collect();
    if head.len() != 5 || head[0] != "%%matrixmarket" || head[1] != "matrix" {
        return Err(parse_err(1, "expected `%%MatrixMarket matrix <format> <field> <symmetry>`"));
    }
    let layout = match head[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(1, format!("unknown format `{other}`"))),
    };
    match head[3].as_str() {
        "integer" | "real" => {}
        "complex" | "pattern" => return Err(Error::UnsupportedField(head[3].clone())),
        other => return Err(parse_err(1, format!("unknown field `{other}`"))),
    }
    let symmetric = match head[4].as_str() {
        "general" => false,
        "symmetric" => true,
        "skew-symmetric" | "hermitian" => return Err(Error::UnsupportedField(head[4].clone())),
        other => return Err(parse_err(1, format!("unknown symmetry `{other}`"))),
    };

    let mut lines = data_lines(text).skip_while(|(n, _)| *n == 1);
    let (size_line, size) = lines.next().ok_or_else(|| parse_err(1, "missing size line"))?;
    let nums: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(size_line, "bad size line")))
        .collect::<Result<_>>()?;
    let expected_len = if layout == Layout::Coordinate { 3 } else { 2 };
    if nums.len() != expected_len {
        return Err(parse_err(size_line, format!("size line needs {expected_len} numbers")));
    }
    let (rows, cols) = (nums[0], nums[1]);
    if symmetric && rows != cols {
        return Err(parse_err(size_line, "symmetric matrix must be square"));
    }
    let value = |tok: Option<&str>, line: usize| -> Result<D::Elem> {
        let tok = tok.ok_or_else(|| parse_err(line, "missing value"))?;
        dom.parse_value(tok).ok_or_else(|| parse_err(line, format!("bad {} value `{tok}`", D::FIELD)))
    };

    let mut entries = Vec::new();
    let mut push = |i: usize, j: usize, v: D::Elem, line: usize| -> Result<()> {
        if symmetric && j > i {
            return Err(parse_err(line, "symmetric storage must list the lower triangle"));
        }
        if dom.is_zero(&v) {
            return Ok(());
        }
        if symmetric && i != j {
            entries.push((j, i, v.clone()));
        }
        entries.push((i, j, v));
        Ok(())
    };
    let mut count = 0;
    match layout {
        Layout::Coordinate => {
            let nnz = nums[2];
            for (line, l) in lines {
                if count == nnz {
                    return Err(parse_err(line, "more entries than announced"));
                }
                let mut toks = l.split_whitespace();
                let i = parse_index(toks.next(), line, "row", rows)?;
                let j = parse_index(toks.next(), line, "column", cols)?;
                let v = value(toks.next(), line)?;
                if toks.next().is_some() {
                    return Err(parse_err(line, "trailing tokens"));
                }
                push(i, j, v, line)?;
                count += 1;
            }
            if count != nnz {
                return Err(parse_err(size_line, format!("announced {nnz} entries, found {count}")));
            }
        }
        Layout::Array => {
            let cells: Vec<(usize, usize)> = (0..cols)
                .flat_map(|j| (if symmetric { j } else { 0 }..rows).map(move |i| (i, j)))
                .collect();
            for (line, l) in lines {
                for tok in l.split_whitespace() {
                    let &(i, j) = cells.get(count).ok_or_else(|| parse_err(line, "more values than cells"))?;
                    push(i, j, value(Some(tok), line)?, line)?;
                    count += 1;
                }
            }
            if count != cells.len() {
                return Err(parse_err(size_line, format!("expected {} values, found {count}", cells.len())));
            }
        }
    }
    QuadMatrix::from_triplets_with_leaf(dom, rows, cols, entries, leaf_order)
}

/// Matrix Market text in coordinate general form, sorted by (column, row).
pub fn format_matrix_market<D: MarketDomain>(m: &QuadMatrix<D>) -> String {
    let mut t = m.triplets();
    t.sort_by_key(|&(i, j, _)| (j, i));
    let mut out = format!("%%MatrixMarket matrix coordinate {} general\n", D::FIELD);
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), t.len());
    for (i, j, v) in t {
        let _ = writeln!(out, "{} {} {}", i + 1, j + 1, m.domain().format_value(&v));
    }
    out
}

pub fn read_matrix_market<D: MarketDomain>(dom: D, path: impl AsRef<Path>, leaf_order: usize) -> Result<QuadMatrix<D>> {
    parse_matrix_market(dom, &std::fs::read_to_string(path)?, leaf_order)
}

pub fn write_matrix_market<D: MarketDomain>(m: &QuadMatrix<D>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_matrix_market(m))?;
    Ok(())
}

pub fn parse_poly_matrix(text: &str, leaf_order: usize) -> Result<QuadMatrix<PolyRing>> {
    let mut lines = data_lines(text);
    let (size_line, size) = lines.next().ok_or_else(|| parse_err(1, "missing size line"))?;
    let nums: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(size_line, "bad size line")))
        .collect::<Result<_>>()?;
    let [rows, cols, nnz] = nums[..] else {
        return Err(parse_err(size_line, "size line needs `rows cols nnz`"));
    };
    let mut entries = Vec::with_capacity(nnz);
    for (line, l) in lines {
        let mut toks = l.split_whitespace();
        let i = parse_index(toks.next(), line, "row", rows)?;
        let j = parse_index(toks.next(), line, "column", cols)?;
        let coeffs = toks
            .map(|t| IntegerRing.parse_value(t).ok_or_else(|| parse_err(line, format!("bad coefficient `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Err(parse_err(line, "entry without coefficients"));
        }
        entries.push((i, j, IntPoly::new(coeffs)));
    }
    if entries.len() != nnz {
        return Err(parse_err(size_line, format!("announced {nnz} entries, found {}", entries.len())));
    }
    entries.retain(|(_, _, p)| !p.is_zero());
    QuadMatrix::from_triplets_with_leaf(PolyRing, rows, cols, entries, leaf_order)
}

pub fn format_poly_matrix(m: &QuadMatrix<PolyRing>) -> String {
    let t = m.triplets();
    let mut out = String::from("% polynomial matrix: i j c0 c1 ... ck\n");
    let _ = writeln!(out, "{} {} {}", m.rows(), m.cols(), t.len());
    for (i, j, p) in t {
        let _ = write!(out, "{} {}", i + 1, j + 1);
        for c in p.coeffs() {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    out
}

pub fn read_poly_matrix(path: impl AsRef<Path>, leaf_order: usize) -> Result<QuadMatrix<PolyRing>> {
    parse_poly_matrix(&std::fs::read_to_string(path)?, leaf_order)
}

pub fn write_poly_matrix(m: &QuadMatrix<PolyRing>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_poly_matrix(m))?;
    Ok(())
}

/// Kernel vectors as a Matrix Market matrix whose columns are the vectors.
pub fn vectors_to_matrix<D: Ring>(dom: D, n: usize, vectors: &[Vec<D::Elem>], leaf_order: usize) -> QuadMatrix<D> {
    let entries = vectors
        .iter()
        .enumerate()
        .flat_map(|(j, v)| v.iter().enumerate().map(move |(i, x)| (i, j, x.clone())))
        .filter(|(_, _, x)| !dom.is_zero(x))
        .collect();
    QuadMatrix::from_triplets_with_leaf(dom.clone(), n, vectors.len().max(1), entries, leaf_order)
        .expect("vector entries are in range")
}
