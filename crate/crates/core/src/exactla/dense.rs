use super::field::PrimeField;
use crate::error::{Error, Result};

/// Small dense matrix over a prime field, row-major. Everything here runs on
/// matrices whose sides are bounded by the ambient dimension (n <= 5 in
/// practice), so clarity wins over blocking tricks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DenseMat {
    pub field: PrimeField,
    pub nrows: usize,
    pub ncols: usize,
    data: Vec<u32>,
}

impl DenseMat {
    pub fn zero(field: PrimeField, nrows: usize, ncols: usize) -> Self {
        DenseMat {
            field,
            nrows,
            ncols,
            data: vec![0; nrows * ncols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_columns(field: PrimeField, nrows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Self::zero(field, nrows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), nrows);
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v % field.modulus());
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.ncols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.ncols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.nrows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.ncols).map(|j| self.column(j)).collect()
    }

    pub fn mul(&self, rhs: &DenseMat) -> DenseMat {
        assert_eq!(self.ncols, rhs.nrows);
        let f = self.field;
        let mut out = DenseMat::zero(f, self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.ncols {
                    let v = f.add(out.get(i, j), f.mul(a, rhs.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.ncols, v.len());
        let f = self.field;
        (0..self.nrows)
            .map(|i| {
                let mut acc = 0;
                for j in 0..self.ncols {
                    acc = f.add(acc, f.mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let (_, pivots) = reduced_column_echelon(self);
        pivots.len()
    }

    pub fn det(&self) -> u32 {
        assert_eq!(self.nrows, self.ncols);
        let f = self.field;
        let n = self.nrows;
        let mut m = self.clone();
        let mut det = 1u32;
        for col in 0..n {
            let pivot = (col..n).find(|&r| m.get(r, col) != 0);
            let Some(pr) = pivot else { return 0 };
            if pr != col {
                for j in 0..n {
                    let a = m.get(col, j);
                    let b = m.get(pr, j);
                    m.set(col, j, b);
                    m.set(pr, j, a);
                }
                det = f.neg(det);
            }
            let p = m.get(col, col);
            det = f.mul(det, p);
            let pinv = f.inv(p).expect("pivot nonzero");
            for r in col + 1..n {
                let factor = f.mul(m.get(r, col), pinv);
                if factor == 0 {
                    continue;
                }
                for j in col..n {
                    let v = f.sub(m.get(r, j), f.mul(factor, m.get(col, j)));
                    m.set(r, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<DenseMat> {
        assert_eq!(self.nrows, self.ncols);
        let f = self.field;
        let n = self.nrows;
        let mut m = self.clone();
        let mut inv = DenseMat::identity(f, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| m.get(r, col) != 0).ok_or(Error::Singular)?;
            if pivot != col {
                for j in 0..n {
                    let (a, b) = (m.get(col, j), m.get(pivot, j));
                    m.set(col, j, b);
                    m.set(pivot, j, a);
                    let (a, b) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, b);
                    inv.set(pivot, j, a);
                }
            }
            let pinv = f.inv(m.get(col, col))?;
            for j in 0..n {
                m.set(col, j, f.mul(m.get(col, j), pinv));
                inv.set(col, j, f.mul(inv.get(col, j), pinv));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = m.get(r, col);
                if factor == 0 {
                    continue;
                }
                for j in 0..n {
                    m.set(r, j, f.sub(m.get(r, j), f.mul(factor, m.get(col, j))));
                    inv.set(r, j, f.sub(inv.get(r, j), f.mul(factor, inv.get(col, j))));
                }
            }
        }
        Ok(inv)
    }
}

/// Unique reduced column echelon form: the topmost nonzero entry of every
/// column is 1, pivot rows strictly increase left to right, and a pivot row
/// is zero in every other column. Zero columns are dropped. Returns the form
/// together with the sorted pivot row indices (0-based).
pub fn reduced_column_echelon(m: &DenseMat) -> (DenseMat, Vec<usize>) {
    let f = m.field;
    let mut cols = m.columns();
    let mut pivots = Vec::new();
    let mut next = 0usize; // first column position not yet fixed
    for row in 0..m.nrows {
        let Some(j) = (next..cols.len()).find(|&j| cols[j][row] != 0) else {
            continue;
        };
        cols.swap(next, j);
        let pinv = f.inv(cols[next][row]).expect("nonzero pivot");
        for v in cols[next].iter_mut() {
            *v = f.mul(*v, pinv);
        }
        for j2 in 0..cols.len() {
            if j2 == next || cols[j2][row] == 0 {
                continue;
            }
            let factor = cols[j2][row];
            for i in 0..m.nrows {
                let sub = f.mul(factor, cols[next][i]);
                cols[j2][i] = f.sub(cols[j2][i], sub);
            }
        }
        pivots.push(row);
        next += 1;
        if next == cols.len() {
            break;
        }
    }
    cols.truncate(next);
    (DenseMat::from_columns(f, m.nrows, &cols), pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn echelon_of_paper_matrix() {
        // 4x3 with columns (1,2,0,0), (0,0,1,0), (0,0,0,1); already reduced,
        // pivot rows {1,3,4} in 1-based labels.
        let m = DenseMat::from_columns(
            f(3),
            4,
            &[vec![1, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]],
        );
        let (n, pivots) = reduced_column_echelon(&m);
        assert_eq!(n, m);
        assert_eq!(pivots, vec![0, 2, 3]);
    }

    #[test]
    fn echelon_of_identity() {
        for p in [2, 3, 5] {
            let id = DenseMat::identity(f(p), 4);
            let (n, pivots) = reduced_column_echelon(&id);
            assert_eq!(n, id);
            assert_eq!(pivots, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn echelon_over_f2() {
        // columns (0,1), (1,1) span F_2^2; unique reduced form is I.
        let m = DenseMat::from_columns(f(2), 2, &[vec![0, 1], vec![1, 1]]);
        let (n, pivots) = reduced_column_echelon(&m);
        assert_eq!(n, DenseMat::identity(f(2), 2));
        assert_eq!(pivots, vec![0, 1]);
    }

    #[test]
    fn echelon_is_idempotent_and_basis_invariant() {
        let m = DenseMat::from_columns(
            f(3),
            3,
            &[vec![1, 2, 1], vec![2, 1, 0], vec![0, 1, 1]],
        );
        let (n, _) = reduced_column_echelon(&m);
        let (n2, _) = reduced_column_echelon(&n);
        assert_eq!(n, n2);
        // right-multiplying by an invertible matrix leaves the form unchanged
        let g = DenseMat::from_columns(f(3), 3, &[vec![1, 1, 0], vec![0, 1, 0], vec![2, 0, 1]]);
        assert_eq!(g.det() != 0, true);
        let (n3, _) = reduced_column_echelon(&m.mul(&g));
        assert_eq!(n, n3);
    }

    #[test]
    fn inverse_round_trip() {
        let m = DenseMat::from_columns(f(5), 3, &[vec![1, 2, 0], vec![3, 1, 1], vec![0, 4, 2]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), DenseMat::identity(f(5), 3));
        let singular = DenseMat::from_columns(f(5), 2, &[vec![1, 2], vec![2, 4]]);
        assert!(singular.inverse().is_err());
        assert_eq!(singular.rank(), 1);
    }
}
