use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::sparse::SparseIntMat;
use crate::error::{Error, Result};

/// Write a sparse matrix in the cache format: a header `nrows ncols nnz
/// modulus` (modulus 0 means rational coefficients) followed by one
/// `row col value` line per entry, 1-indexed. Prime moduli reduce entries to
/// canonical representatives.
pub fn write_sparse_file(path: &Path, m: &SparseIntMat, modulus: u32) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    let entries: Vec<(u32, u32, i64)> = m
        .entries()
        .filter_map(|(r, c, v)| {
            let v = if modulus == 0 {
                v
            } else {
                v.rem_euclid(modulus as i64)
            };
            (v != 0).then_some((r, c, v))
        })
        .collect();
    writeln!(w, "{} {} {} {}", m.nrows, m.ncols, entries.len(), modulus)?;
    for (r, c, v) in entries {
        writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Read a matrix in the cache format. Rational files may carry `a/b` values;
/// each column is scaled by the lcm of its denominators (column scaling does
/// not change any rank), so the result always has integer entries.
pub fn read_sparse_file(path: &Path) -> Result<(SparseIntMat, u32)> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))??;
    let head: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse(format!("bad header `{header}`: {e}")))?;
    let [nrows, ncols, nnz, modulus] = head[..] else {
        return Err(Error::Parse(format!("bad header `{header}`")));
    };
    let mut raw: Vec<Vec<(u32, i64, i64)>> = vec![Vec::new(); ncols]; // (row, num, den)
    for _ in 0..nnz {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated matrix file".into()))??;
        let mut toks = line.split_whitespace();
        let (Some(r), Some(c), Some(v)) = (toks.next(), toks.next(), toks.next()) else {
            return Err(Error::Parse(format!("bad entry line `{line}`")));
        };
        let r: usize = r
            .parse()
            .map_err(|_| Error::Parse(format!("bad row in `{line}`")))?;
        let c: usize = c
            .parse()
            .map_err(|_| Error::Parse(format!("bad col in `{line}`")))?;
        if r == 0 || c == 0 || r > nrows || c > ncols {
            return Err(Error::Parse(format!("entry out of range in `{line}`")));
        }
        let (num, den) = parse_fraction(v)?;
        if modulus != 0 && den != 1 {
            return Err(Error::Parse(format!(
                "fractional value `{v}` with prime modulus {modulus}"
            )));
        }
        raw[c - 1].push((r as u32 - 1, num, den));
    }
    let cols = raw
        .into_iter()
        .map(|col| {
            let mut l: i64 = 1;
            for &(_, _, den) in &col {
                l = lcm(l, den);
            }
            col.into_iter()
                .map(|(r, num, den)| (r, num * (l / den)))
                .collect()
        })
        .collect();
    Ok((SparseIntMat::from_columns(nrows, cols), modulus as u32))
}

fn parse_fraction(s: &str) -> Result<(i64, i64)> {
    if let Some((a, b)) = s.split_once('/') {
        let num: i64 = a
            .parse()
            .map_err(|_| Error::Parse(format!("bad fraction `{s}`")))?;
        let den: i64 = b
            .parse()
            .map_err(|_| Error::Parse(format!("bad fraction `{s}`")))?;
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        Ok(if den < 0 { (-num, -den) } else { (num, den) })
    } else {
        let num: i64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad value `{s}`")))?;
        Ok((num, 1))
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    let g = gcd(a.abs(), b.abs());
    a / g * b
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::Coeff;

    #[test]
    fn round_trip_integer_matrix() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.smat");
        let m = SparseIntMat::from_columns(3, vec![vec![(0, 1), (2, -2)], vec![(1, 5)]]);
        write_sparse_file(&path, &m, 0).unwrap();
        let (back, modulus) = read_sparse_file(&path).unwrap();
        assert_eq!(modulus, 0);
        assert_eq!(back.nrows, 3);
        assert_eq!(back.ncols, 2);
        assert_eq!(
            back.entries().collect::<Vec<_>>(),
            m.entries().collect::<Vec<_>>()
        );
    }

    #[test]
    fn prime_modulus_reduces_entries() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.smat");
        let m = SparseIntMat::from_columns(2, vec![vec![(0, -1), (1, 3)]]);
        write_sparse_file(&path, &m, 3).unwrap();
        let (back, modulus) = read_sparse_file(&path).unwrap();
        assert_eq!(modulus, 3);
        // -1 becomes 2, 3 becomes 0 and is dropped
        assert_eq!(back.entries().collect::<Vec<_>>(), vec![(0, 0, 2)]);
    }

    #[test]
    fn fractions_scale_per_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.smat");
        std::fs::write(&path, "2 1 2 0\n1 1 1/2\n2 1 1/3\n").unwrap();
        let (m, _) = read_sparse_file(&path).unwrap();
        assert_eq!(m.entries().collect::<Vec<_>>(), vec![(0, 0, 3), (1, 0, 2)]);
        assert_eq!(m.rank(&Coeff::Rational), 1);
    }
}
