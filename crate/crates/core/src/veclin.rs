//! Field-generic sparse row reduction used by the presentation oracles: a
//! `QuotientMap` absorbs relation rows and afterwards maps arbitrary vectors
//! to canonical coordinates in the quotient module.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactla::{Coeff, PrimeField};

pub trait Fld: Clone {
    type E: Clone + PartialEq + std::fmt::Debug;
    fn from_i64(&self, v: i64) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
}

#[derive(Clone)]
pub struct RatF;

impl Fld for RatF {
    type E = BigRational;
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        BigRational::one() / a
    }
}

#[derive(Clone)]
pub struct ModpF(pub PrimeField);

impl Fld for ModpF {
    type E = u32;
    fn from_i64(&self, v: i64) -> u32 {
        self.0.reduce_i64(v)
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.0.add(*a, *b)
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.0.mul(*a, *b)
    }
    fn neg(&self, a: &u32) -> u32 {
        self.0.neg(*a)
    }
    fn inv(&self, a: &u32) -> u32 {
        self.0.inv(*a).expect("nonzero")
    }
}

/// Sorted sparse vector; zero entries are never stored.
pub type SVec<E> = Vec<(u32, E)>;

fn axpy<F: Fld>(f: &F, v: &SVec<F::E>, c: &F::E, row: &SVec<F::E>) -> SVec<F::E> {
    // v + c * row, merged by index
    let mut out = Vec::with_capacity(v.len() + row.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < row.len() {
        if j == row.len() || (i < v.len() && v[i].0 < row[j].0) {
            out.push(v[i].clone());
            i += 1;
        } else if i == v.len() || row[j].0 < v[i].0 {
            out.push((row[j].0, f.mul(c, &row[j].1)));
            j += 1;
        } else {
            let s = f.add(&v[i].1, &f.mul(c, &row[j].1));
            if !f.is_zero(&s) {
                out.push((v[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row-reduced presentation of a quotient of a free module k^{total} by a
/// span of relation rows. Pivot rows are keyed by their largest support
/// index and normalized to leading coefficient 1 there, so reduction is a
/// single descending sweep.
pub struct QuotientMap<F: Fld> {
    field: F,
    total: usize,
    pivots: BTreeMap<u32, SVec<F::E>>,
}

impl<F: Fld> QuotientMap<F> {
    pub fn new(field: F, total: usize) -> Self {
        QuotientMap {
            field,
            total,
            pivots: BTreeMap::new(),
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn dim(&self) -> usize {
        self.total - self.pivots.len()
    }

    /// Indices of the free (non-pivot) coordinates: a basis of the quotient.
    pub fn free_indices(&self) -> Vec<u32> {
        (0..self.total as u32)
            .filter(|i| !self.pivots.contains_key(i))
            .collect()
    }

    pub fn add_relation(&mut self, row: SVec<F::E>) {
        let reduced = self.reduce(row);
        if let Some((lead, lv)) = reduced.last().map(|e| (e.0, e.1.clone())) {
            let inv = self.field.inv(&lv);
            let normalized = reduced
                .into_iter()
                .map(|(i, v)| (i, self.field.mul(&v, &inv)))
                .collect();
            self.pivots.insert(lead, normalized);
        }
    }

    /// Canonical representative of the class of `v`: supported only on free
    /// indices, equal classes reduce to equal vectors.
    pub fn reduce(&self, mut v: SVec<F::E>) -> SVec<F::E> {
        loop {
            let Some(hit) = v
                .iter()
                .rev()
                .find(|(i, _)| self.pivots.contains_key(i))
                .map(|(i, c)| (*i, c.clone()))
            else {
                return v;
            };
            let row = &self.pivots[&hit.0];
            let c = self.field.neg(&hit.1);
            v = axpy(&self.field, &v, &c, row);
        }
    }

    pub fn reduce_i64(&self, v: &[(u32, i64)]) -> SVec<F::E> {
        let mut merged: BTreeMap<u32, F::E> = BTreeMap::new();
        for &(i, c) in v {
            let c = self.field.from_i64(c);
            merged
                .entry(i)
                .and_modify(|e| *e = self.field.add(e, &c))
                .or_insert(c);
        }
        let sv: SVec<F::E> = merged
            .into_iter()
            .filter(|(_, c)| !self.field.is_zero(c))
            .collect();
        self.reduce(sv)
    }

    pub fn is_zero_class(&self, v: &[(u32, i64)]) -> bool {
        self.reduce_i64(v).is_empty()
    }
}

/// A quotient map over either coefficient field.
pub enum QMap {
    Rat(QuotientMap<RatF>),
    Modp(QuotientMap<ModpF>),
}

impl QMap {
    pub fn new(k: &Coeff, total: usize) -> Result<Self> {
        Ok(match k {
            Coeff::Rational => QMap::Rat(QuotientMap::new(RatF, total)),
            Coeff::Prime(p) => QMap::Modp(QuotientMap::new(ModpF(PrimeField::new(*p)?), total)),
        })
    }

    pub fn total(&self) -> usize {
        match self {
            QMap::Rat(m) => m.total(),
            QMap::Modp(m) => m.total(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            QMap::Rat(m) => m.dim(),
            QMap::Modp(m) => m.dim(),
        }
    }

    pub fn free_indices(&self) -> Vec<u32> {
        match self {
            QMap::Rat(m) => m.free_indices(),
            QMap::Modp(m) => m.free_indices(),
        }
    }

    pub fn add_relation_i64(&mut self, row: &[(u32, i64)]) {
        match self {
            QMap::Rat(m) => {
                let row = row.iter().map(|&(i, c)| (i, RatF.from_i64(c))).collect();
                m.add_relation(row);
            }
            QMap::Modp(m) => {
                let f = m.field.clone();
                let row: SVec<u32> = row
                    .iter()
                    .filter_map(|&(i, c)| {
                        let c = f.from_i64(c);
                        (!f.is_zero(&c)).then_some((i, c))
                    })
                    .collect();
                m.add_relation(row);
            }
        }
    }

    pub fn is_zero_class(&self, v: &[(u32, i64)]) -> bool {
        match self {
            QMap::Rat(m) => m.is_zero_class(v),
            QMap::Modp(m) => m.is_zero_class(v),
        }
    }

    /// Reduce an integer vector and express it in quotient coordinates
    /// (positions indexed by `free_indices`), as one integer column after
    /// clearing denominators. Clearing scales the column, which every caller
    /// (rank computations) is insensitive to.
    pub fn coords_as_int_column(&self, v: &[(u32, i64)], free_pos: &BTreeMap<u32, u32>) -> Result<Vec<(u32, i64)>> {
        match self {
            QMap::Modp(m) => {
                let red = m.reduce_i64(v);
                Ok(red
                    .into_iter()
                    .map(|(i, c)| (free_pos[&i], c as i64))
                    .collect())
            }
            QMap::Rat(m) => {
                let red = m.reduce_i64(v);
                let mut lcm = BigInt::one();
                for (_, c) in &red {
                    lcm = num_integer::lcm(lcm, c.denom().abs());
                }
                let mut out = Vec::with_capacity(red.len());
                for (i, c) in red {
                    let scaled = (c * BigRational::from_integer(lcm.clone())).to_integer();
                    let small: i64 = scaled
                        .try_into()
                        .map_err(|_| Error::TooLarge("quotient coordinate overflow".into()))?;
                    out.push((free_pos[&i], small));
                }
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_of_plane_by_diagonal() {
        // k^2 / <e0 - e1> has dimension 1 and e0 ~ e1
        for k in [Coeff::Rational, Coeff::Prime(3)] {
            let mut m = QMap::new(&k, 2).unwrap();
            m.add_relation_i64(&[(0, 1), (1, -1)]);
            assert_eq!(m.dim(), 1);
            assert!(m.is_zero_class(&[(0, 1), (1, -1)]));
            assert!(m.is_zero_class(&[(0, 5), (1, -5)]));
            assert!(!m.is_zero_class(&[(0, 1)]));
        }
    }

    #[test]
    fn characteristic_matters() {
        let mut m2 = QMap::new(&Coeff::Prime(2), 1).unwrap();
        m2.add_relation_i64(&[(0, 2)]); // zero row mod 2
        assert_eq!(m2.dim(), 1);
        let mut mq = QMap::new(&Coeff::Rational, 1).unwrap();
        mq.add_relation_i64(&[(0, 2)]);
        assert_eq!(mq.dim(), 0);
    }

    #[test]
    fn duplicate_relations_are_harmless() {
        let mut m = QMap::new(&Coeff::Rational, 3).unwrap();
        for _ in 0..3 {
            m.add_relation_i64(&[(0, 1), (2, 1)]);
            m.add_relation_i64(&[(1, 2), (2, -2)]);
        }
        assert_eq!(m.dim(), 1);
    }
}
