//! Plain-text matrix format.
//!
//! Line 1 holds the dimension `D`; each of the following `D` lines holds one
//! matrix row as `D` whitespace-separated complex entries, every entry
//! written as a `re im` pair. Values are written with 17 significant digits,
//! which round-trips `f64` exactly.

use std::io::{BufRead, Write};
use std::path::Path;

use ndarray::Array2;

use crate::{Error, FockOperator, Result, C64};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_matrix<W: Write>(mut w: W, op: &FockOperator) -> Result<()> {
    let dim = op.dim();
    writeln!(w, "{dim}")?;
    let mut line = String::new();
    for r in 0..dim {
        line.clear();
        for c in 0..dim {
            if c > 0 {
                line.push(' ');
            }
            let z = op.get(r, c);
            line.push_str(&fmt_f64(z.re));
            line.push(' ');
            line.push_str(&fmt_f64(z.im));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_matrix<R: BufRead>(r: R) -> Result<FockOperator> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input"))??;
    let dim: usize = header
        .trim()
        .parse()
        .map_err(|_| parse_err(1, "first line must be the dimension"))?;
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }

    let mut mat = Array2::<C64>::zeros((dim, dim));
    for row in 0..dim {
        let line_no = row + 2;
        let line = lines
            .next()
            .ok_or_else(|| parse_err(line_no, "unexpected end of file"))??;
        let mut fields = line.split_whitespace();
        for col in 0..dim {
            let re = next_f64(&mut fields, line_no)?;
            let im = next_f64(&mut fields, line_no)?;
            mat[[row, col]] = C64::new(re, im);
        }
        if fields.next().is_some() {
            return Err(parse_err(line_no, "trailing fields on row"));
        }
    }
    FockOperator::from_matrix(mat)
}

pub fn write_matrix_file<P: AsRef<Path>>(path: P, op: &FockOperator) -> Result<()> {
    let mut buf = Vec::new();
    write_matrix(&mut buf, op)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_matrix_file<P: AsRef<Path>>(path: P) -> Result<FockOperator> {
    let file = std::fs::File::open(path)?;
    read_matrix(std::io::BufReader::new(file))
}

fn next_f64<'a, I: Iterator<Item = &'a str>>(fields: &mut I, line: usize) -> Result<f64> {
    let tok = fields
        .next()
        .ok_or_else(|| parse_err(line, "row has too few fields"))?;
    tok.parse()
        .map_err(|_| parse_err(line, &format!("bad float `{tok}`")))
}

fn parse_err(line: usize, message: &str) -> Error {
    Error::MatrixParse {
        line,
        message: message.to_string(),
    }
}
