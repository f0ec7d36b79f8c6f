//! Plain-text matrix format: a header line `dim d n`, then `dim²` lines
//! `row col re im` in row-major order, 17 significant digits.

use std::io::{BufRead, Write};

use num_complex::Complex;

use super::Operator;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub fn write_matrix<R: Real, W: Write>(op: &Operator<R>, mut w: W) -> Result<()> {
    let f = op.factors();
    let d = f.first().copied().unwrap_or(1);
    if f.iter().any(|&x| x != d) {
        return Err(Error::DimensionMismatch(format!("text format needs uniform factors, got {f:?}")));
    }
    writeln!(w, "{} {} {}", op.dim(), d, f.len())?;
    for i in 0..op.dim() {
        for j in 0..op.dim() {
            let z = op[(i, j)];
            writeln!(w, "{} {} {:.16e} {:.16e}", i, j, z.re.as_f64(), z.im.as_f64())?;
        }
    }
    Ok(())
}

pub fn read_matrix<R: Real, B: BufRead>(r: B) -> Result<Operator<R>> {
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))??;
    let h: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("header {header:?}: {e}"))))
        .collect::<Result<_>>()?;
    let [dim, d, n] = h[..] else {
        return Err(Error::Parse(format!("header {header:?} must be `dim d n`")));
    };
    if d.checked_pow(n as u32) != Some(dim) {
        return Err(Error::Parse(format!("header {header:?}: dim != d^n")));
    }
    let mut op = Operator::zeros(&vec![d; n]);
    let mut seen = vec![false; dim * dim];
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.len() != 4 {
            return Err(Error::Parse(format!("entry line {line:?}")));
        }
        let idx = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse(format!("{line:?}: {e}")));
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{line:?}: {e}")));
        let (i, j) = (idx(t[0])?, idx(t[1])?);
        if i >= dim || j >= dim {
            return Err(Error::Parse(format!("entry ({i}, {j}) outside {dim}x{dim}")));
        }
        op[(i, j)] = Complex::new(R::lit(num(t[2])?), R::lit(num(t[3])?));
        seen[i * dim + j] = true;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::Parse(format!("missing entry ({}, {})", missing / dim, missing % dim)));
    }
    Ok(op)
}
