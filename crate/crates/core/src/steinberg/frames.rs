//! The apartment monoid on frames (canonically sorted independent line sets
//! with a sign) and the presentation-quotient oracle for St(K^n): the free
//! module on canonical frame symbols modulo every instance of the three-term
//! relation, with a coordinate map used to cross-check straightening.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::SteinbergElement;
use crate::error::{Error, Result};
use crate::exactla::{Coeff, DenseMat, PrimeField};
use crate::subspaces::{enumerate_lines, Line, Subspace, Vect};
use crate::veclin::QMap;

/// A frame: independent lines sorted lexicographically, with the sign of the
/// permutation relating the input order to the canonical one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameClass {
    pub lines: Vec<Line>,
    pub sign: i8,
}

/// Canonicalize a tuple of vectors as a signed frame.
pub fn frame_canonicalize(field: PrimeField, vectors: &[Vect]) -> Result<FrameClass> {
    if vectors.is_empty() {
        return Err(Error::NotABasis);
    }
    let n = vectors[0].len();
    let m = DenseMat::from_columns(field, n, vectors);
    if m.rank() != vectors.len() {
        return Err(Error::NotABasis);
    }
    let lines: Vec<Line> = vectors
        .iter()
        .map(|v| Line::new(field, v))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..lines.len()).collect();
    order.sort_by(|&a, &b| lines[a].cmp(&lines[b]));
    let mut inversions = 0;
    for a in 0..lines.len() {
        for b in a + 1..lines.len() {
            if lines[a] > lines[b] {
                inversions += 1;
            }
        }
    }
    Ok(FrameClass {
        lines: order.into_iter().map(|i| lines[i].clone()).collect(),
        sign: if inversions % 2 == 0 { 1 } else { -1 },
    })
}

/// Product in the apartment monoid: signed union of the two line sets.
pub fn apartment_product(field: PrimeField, f1: &FrameClass, f2: &FrameClass) -> Result<FrameClass> {
    let mut vectors: Vec<Vect> = f1.lines.iter().map(|l| l.coords.clone()).collect();
    vectors.extend(f2.lines.iter().map(|l| l.coords.clone()));
    let merged = frame_canonicalize(field, &vectors).map_err(|_| Error::NotDirect {
        got: 0,
        expected: vectors.len(),
    })?;
    Ok(FrameClass {
        lines: merged.lines,
        sign: merged.sign * f1.sign * f2.sign,
    })
}

/// All frames of a subspace `w`, i.e. sets of dim(w) independent lines
/// spanning it, each sorted lexicographically. Lines are listed in ambient
/// coordinates.
pub fn enumerate_frames(w: &Subspace) -> Vec<Vec<Line>> {
    let field = w.field();
    let d = w.dim();
    // lines of the subspace, via lines of F_q^d pushed through B_W
    let local = enumerate_lines(field, d.max(1));
    let mut lines: Vec<Line> = if d == 0 {
        Vec::new()
    } else {
        local
            .iter()
            .map(|l| Line::new(field, &w.from_coords(&l.coords)).expect("nonzero"))
            .collect()
    };
    lines.sort();
    let mut out = Vec::new();
    if d == 0 {
        out.push(Vec::new());
        return out;
    }
    let mut acc: Vec<usize> = Vec::new();
    rec_frames(field, w, &lines, 0, &mut acc, &mut out);
    out
}

fn rec_frames(
    field: PrimeField,
    w: &Subspace,
    lines: &[Line],
    start: usize,
    acc: &mut Vec<usize>,
    out: &mut Vec<Vec<Line>>,
) {
    if acc.len() == w.dim() {
        out.push(acc.iter().map(|&i| lines[i].clone()).collect());
        return;
    }
    for i in start..lines.len() {
        let mut vs: Vec<Vect> = acc.iter().map(|&j| lines[j].coords.clone()).collect();
        vs.push(lines[i].coords.clone());
        let m = DenseMat::from_columns(field, lines[i].coords.len(), &vs);
        if m.rank() != vs.len() {
            continue;
        }
        acc.push(i);
        rec_frames(field, w, lines, i + 1, acc, out);
        acc.pop();
    }
}

/// The free module on the canonical frames of K^n modulo every instance of
/// the three-term relation. Used as an independent oracle for straightening.
pub struct PresentationOracle {
    pub field: PrimeField,
    pub n: usize,
    pub k: Coeff,
    frames: Vec<Vec<Line>>,
    index: HashMap<Vec<Line>, u32>,
    map: QMap,
}

impl PresentationOracle {
    /// Build the oracle. Budget: the frame count and relation count must stay
    /// at desk scale (q=2: n <= 4; q=3: n <= 3; larger q: n <= 2).
    pub fn build(field: PrimeField, n: usize, k: &Coeff) -> Result<Self> {
        let q = field.modulus();
        let limit = match q {
            2 => 4,
            3 => 3,
            _ => 2,
        };
        if n > limit {
            return Err(Error::TooLarge(format!(
                "presentation oracle budget is n <= {limit} for q = {q}"
            )));
        }
        let full = Subspace::full(field, n);
        let frames = enumerate_frames(&full);
        let index: HashMap<Vec<Line>, u32> = frames
            .iter()
            .enumerate()
            .map(|(i, fr)| (fr.clone(), i as u32))
            .collect();
        let mut oracle = PresentationOracle {
            field,
            n,
            k: *k,
            frames,
            index,
            map: QMap::new(k, 0)?,
        };
        let mut map = QMap::new(k, oracle.frames.len())?;
        let mut seen: HashSet<Vec<(u32, i64)>> = HashSet::new();
        for row in oracle.relation_rows()? {
            if seen.insert(normalize_row(&row)) {
                map.add_relation_i64(&row);
            }
        }
        oracle.map = map;
        Ok(oracle)
    }

    /// Every instance of the three-term relation over canonical frames:
    /// [v1,v2,R] - [v0,v2,R] + [v0,v1,R] with v0 = v1 + v2, for all
    /// independent pairs (v1, v2) and all completions R to a basis.
    fn relation_rows(&self) -> Result<Vec<Vec<(u32, i64)>>> {
        let field = self.field;
        let n = self.n;
        let q = field.modulus();
        let mut nonzero: Vec<Vect> = Vec::new();
        let mut v = vec![0u32; n];
        loop {
            if v.iter().any(|&x| x != 0) {
                nonzero.push(v.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                v[i] += 1;
                if v[i] < q {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        let mut rows = Vec::new();
        for v1 in &nonzero {
            for v2 in &nonzero {
                let pair = DenseMat::from_columns(field, n, &[v1.clone(), v2.clone()]);
                if pair.rank() != 2 {
                    continue;
                }
                let v0: Vect = (0..n).map(|i| field.add(v1[i], v2[i])).collect();
                let mut rest = Vec::new();
                self.completions(&[v1.clone(), v2.clone()], &nonzero, 0, &mut rest, &mut |r| {
                    let mut row: BTreeMap<u32, i64> = BTreeMap::new();
                    for (vecs, sgn) in [
                        (vec![v1.clone(), v2.clone()], 1i64),
                        (vec![v0.clone(), v2.clone()], -1),
                        (vec![v0.clone(), v1.clone()], 1),
                    ] {
                        let mut all = vecs;
                        all.extend_from_slice(r);
                        let frame = frame_canonicalize(field, &all).expect("basis");
                        let idx = self.index[&frame.lines];
                        *row.entry(idx).or_insert(0) += sgn * frame.sign as i64;
                    }
                    let row: Vec<(u32, i64)> =
                        row.into_iter().filter(|(_, c)| *c != 0).collect();
                    if !row.is_empty() {
                        rows.push(row);
                    }
                });
            }
        }
        Ok(rows)
    }

    fn completions(
        &self,
        fixed: &[Vect],
        nonzero: &[Vect],
        start: usize,
        acc: &mut Vec<Vect>,
        emit: &mut impl FnMut(&[Vect]),
    ) {
        if fixed.len() + acc.len() == self.n {
            emit(acc);
            return;
        }
        for i in start..nonzero.len() {
            let mut all = fixed.to_vec();
            all.extend(acc.iter().cloned());
            all.push(nonzero[i].clone());
            if DenseMat::from_columns(self.field, self.n, &all).rank() != all.len() {
                continue;
            }
            acc.push(nonzero[i].clone());
            self.completions(fixed, nonzero, i + 1, acc, emit);
            acc.pop();
        }
    }

    /// Dimension of the presentation quotient.
    pub fn dim(&self) -> usize {
        self.map.dim()
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    /// The class of an apartment symbol as a sparse vector over frames.
    pub fn symbol_vector(&self, vectors: &[Vect]) -> Result<Vec<(u32, i64)>> {
        let frame = frame_canonicalize(self.field, vectors)?;
        if frame.lines.len() != self.n {
            return Err(Error::InvalidApartment);
        }
        let idx = *self
            .index
            .get(&frame.lines)
            .ok_or(Error::InvalidApartment)?;
        Ok(vec![(idx, frame.sign as i64)])
    }

    /// The class of a straightened element: each PBW index contributes its
    /// apartment symbol, weighted by its coefficient.
    pub fn element_vector(&self, x: &SteinbergElement) -> Result<Vec<(u32, i64)>> {
        let mut acc: BTreeMap<u32, i64> = BTreeMap::new();
        for (idx, c) in &x.terms {
            let vectors = idx.apartment_vectors(&x.space);
            for (i, s) in self.symbol_vector(&vectors)? {
                *acc.entry(i).or_insert(0) += s * c;
            }
        }
        Ok(acc.into_iter().filter(|(_, c)| *c != 0).collect())
    }

    /// True when the two vectors have the same image in the quotient.
    pub fn same_class(&self, a: &[(u32, i64)], b: &[(u32, i64)]) -> bool {
        let mut diff: BTreeMap<u32, i64> = BTreeMap::new();
        for &(i, c) in a {
            *diff.entry(i).or_insert(0) += c;
        }
        for &(i, c) in b {
            *diff.entry(i).or_insert(0) -= c;
        }
        let diff: Vec<(u32, i64)> = diff.into_iter().filter(|(_, c)| *c != 0).collect();
        self.map.is_zero_class(&diff)
    }

    /// Check a symbol against straightening: the straightened coordinates
    /// must map to the symbol's own class in the presentation quotient.
    pub fn check_straighten(&self, vectors: &[Vect], x: &SteinbergElement) -> Result<bool> {
        let lhs = self.symbol_vector(vectors)?;
        let rhs = self.element_vector(x)?;
        Ok(self.same_class(&lhs, &rhs))
    }
}

fn normalize_row(row: &[(u32, i64)]) -> Vec<(u32, i64)> {
    let mut r = row.to_vec();
    if let Some(&(_, first)) = r.first() {
        if first < 0 {
            for e in r.iter_mut() {
                e.1 = -e.1;
            }
        }
    }
    r
}
