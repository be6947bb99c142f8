//! The Steinberg module St(W) in its unipotent (PBW) basis: straightening of
//! apartment symbols, products along direct sums, GL-actions, the apartment
//! monoid on frames, an independent presentation-quotient oracle, and the
//! oriented variants.

mod frames;
mod oriented;

pub use frames::{
    apartment_product, enumerate_frames, frame_canonicalize, FrameClass, PresentationOracle,
};
pub use oriented::{
    orientation_classes, oriented_module, OrientedKind, OrientedPresentation, OrientedSpace,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::{Coeff, DenseMat, PrimeField};
use crate::subspaces::{canonical_subspace, direct_sum, Subspace, Vect};

/// Index of a PBW basis element of St(W): a unit upper triangular d x d
/// matrix over F_q, stored as its strictly-upper entries column by column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PbwIndex {
    pub dim: usize,
    pub entries: Vec<u32>,
}

impl PbwIndex {
    pub fn identity(dim: usize) -> Self {
        PbwIndex {
            dim,
            entries: vec![0; dim * (dim - 1) / 2],
        }
    }

    pub fn from_matrix(m: &DenseMat) -> Self {
        let d = m.nrows;
        let mut entries = Vec::with_capacity(d * (d - 1) / 2);
        for j in 1..d {
            for i in 0..j {
                entries.push(m.get(i, j));
            }
        }
        PbwIndex { dim: d, entries }
    }

    pub fn to_matrix(&self, field: PrimeField) -> DenseMat {
        let mut m = DenseMat::identity(field, self.dim);
        let mut t = 0;
        for j in 1..self.dim {
            for i in 0..j {
                m.set(i, j, self.entries[t]);
                t += 1;
            }
        }
        m
    }

    /// Apartment vectors of this basis element, in ambient coordinates.
    pub fn apartment_vectors(&self, w: &Subspace) -> Vec<Vect> {
        assert_eq!(self.dim, w.dim());
        let g = self.to_matrix(w.field());
        w.basis_matrix().mul(&g).columns()
    }
}

/// All q^{d(d-1)/2} PBW indices of a d-dimensional space, in a fixed
/// lexicographic order on the strictly-upper entries.
pub fn pbw_basis(field: PrimeField, dim: usize) -> Vec<PbwIndex> {
    let q = field.modulus();
    let len = dim * (dim - 1) / 2;
    let mut out = Vec::new();
    let mut entries = vec![0u32; len];
    loop {
        out.push(PbwIndex {
            dim,
            entries: entries.clone(),
        });
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            entries[i] += 1;
            if entries[i] < q {
                break;
            }
            entries[i] = 0;
        }
    }
}

/// An element of St(W) with integer coefficients on the PBW basis. Integer
/// coefficients are canonical (the presentation is defined over the
/// integers); reduce with [`SteinbergElement::reduced`] to land in a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinbergElement {
    pub space: Subspace,
    pub terms: BTreeMap<PbwIndex, i64>,
}

impl SteinbergElement {
    pub fn zero(space: Subspace) -> Self {
        SteinbergElement {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis_element(space: Subspace, idx: PbwIndex) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(idx, 1);
        SteinbergElement { space, terms }
    }

    pub fn add_term(&mut self, idx: PbwIndex, coeff: i64) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(idx) {
            Entry::Vacant(e) => {
                if coeff != 0 {
                    e.insert(coeff);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&mut self, other: &SteinbergElement, scale: i64) {
        assert_eq!(self.space, other.space);
        for (idx, c) in &other.terms {
            self.add_term(idx.clone(), c * scale);
        }
    }

    /// Drop coefficients that vanish in the given field.
    pub fn reduced(&self, k: &Coeff) -> SteinbergElement {
        let terms = self
            .terms
            .iter()
            .filter(|(_, &c)| match k {
                Coeff::Rational => c != 0,
                Coeff::Prime(p) => c.rem_euclid(*p as i64) != 0,
            })
            .map(|(i, &c)| (i.clone(), c))
            .collect();
        SteinbergElement {
            space: self.space.clone(),
            terms,
        }
    }
}

impl std::fmt::Display for SteinbergElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let sign = if *c >= 0 { "+" } else { "-" };
            let vectors = idx.apartment_vectors(&self.space);
            let body = vectors
                .iter()
                .map(|v| {
                    v.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect::<Vec<_>>()
                .join(";");
            write!(f, "{}{}*[{}]", sign, c.abs(), body)?;
        }
        Ok(())
    }
}

/// Straighten the symbol given by `vectors` (a basis of `space`, in ambient
/// coordinates) into the PBW basis of `space`.
///
/// Working in B_W coordinates: scale every column so its level entry is 1;
/// while two columns share a level, take the largest colliding level, the two
/// smallest positions a < b carrying it, set u = w_a - w_b and rewrite
/// x = x{a <- u} - x{a <- u, b <- w_a}; once the levels are distinct, sort by
/// level, pick up the permutation sign, and read off the unit upper
/// triangular index. The multiset of levels strictly decreases, so this
/// terminates.
pub fn straighten(space: &Subspace, vectors: &[Vect]) -> Result<SteinbergElement> {
    let d = space.dim();
    if vectors.len() != d {
        return Err(Error::InvalidApartment);
    }
    let mut cols = Vec::with_capacity(d);
    for v in vectors {
        cols.push(space.coords_of(v).ok_or(Error::InvalidApartment)?);
    }
    if d > 0 && DenseMat::from_columns(space.field(), d, &cols).rank() != d {
        return Err(Error::InvalidApartment);
    }
    let mut out = SteinbergElement::zero(space.clone());
    for (idx, c) in straighten_coords(space.field(), d, cols) {
        out.add_term(idx, c);
    }
    Ok(out)
}

/// Straighten a coordinate matrix (columns are vectors in B_W coordinates).
/// The caller guarantees the columns are linearly independent.
pub(crate) fn straighten_coords(
    field: PrimeField,
    d: usize,
    cols: Vec<Vect>,
) -> Vec<(PbwIndex, i64)> {
    let mut acc: BTreeMap<PbwIndex, i64> = BTreeMap::new();
    let mut work: Vec<(Vec<Vect>, i64)> = vec![(cols, 1)];
    while let Some((mut cols, coeff)) = work.pop() {
        // scaling relation: level entry becomes 1, coefficient unchanged
        let mut levels = Vec::with_capacity(d);
        for col in cols.iter_mut() {
            let level = col
                .iter()
                .rposition(|&x| x != 0)
                .expect("independent columns stay nonzero");
            let inv = field.inv(col[level]).expect("nonzero level entry");
            if inv != 1 {
                for x in col.iter_mut() {
                    *x = field.mul(*x, inv);
                }
            }
            levels.push(level);
        }
        match find_collision(&levels) {
            None => {
                let mut order: Vec<usize> = (0..d).collect();
                order.sort_by_key(|&j| levels[j]);
                let mut inversions = 0;
                for a in 0..d {
                    for b in a + 1..d {
                        if levels[a] > levels[b] {
                            inversions += 1;
                        }
                    }
                }
                let sign = if inversions % 2 == 0 { 1 } else { -1 };
                let sorted: Vec<Vect> = order.iter().map(|&j| cols[j].clone()).collect();
                let m = DenseMat::from_columns(field, d, &sorted);
                let idx = PbwIndex::from_matrix(&m);
                let e = acc.entry(idx).or_insert(0);
                *e += sign * coeff;
            }
            Some((a, b)) => {
                let u: Vect = (0..d)
                    .map(|i| field.sub(cols[a][i], cols[b][i]))
                    .collect();
                let mut first = cols.clone();
                first[a] = u.clone();
                let mut second = cols.clone();
                second[a] = u;
                second[b] = cols[a].clone();
                work.push((first, coeff));
                work.push((second, -coeff));
            }
        }
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

/// Largest colliding level; returns the two smallest positions carrying it.
fn find_collision(levels: &[usize]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None; // (level, a, b)
    for a in 0..levels.len() {
        for b in a + 1..levels.len() {
            if levels[a] == levels[b] {
                let cand = (levels[a], a, b);
                best = Some(match best {
                    None => cand,
                    Some(cur) => {
                        if cand.0 > cur.0 || (cand.0 == cur.0 && (cand.1, cand.2) < (cur.1, cur.2))
                        {
                            cand
                        } else {
                            cur
                        }
                    }
                });
            }
        }
    }
    best.map(|(_, a, b)| (a, b))
}

/// Product St(W1) x St(W2) -> St(W1 + W2): concatenate apartment symbols,
/// re-express in the canonical basis of the sum and straighten, bilinearly.
pub fn st_multiply(x: &SteinbergElement, y: &SteinbergElement) -> Result<SteinbergElement> {
    let merged = direct_sum(&[x.space.clone(), y.space.clone()])?;
    let mut out = SteinbergElement::zero(merged.clone());
    for (ix, cx) in &x.terms {
        let vx = ix.apartment_vectors(&x.space);
        for (iy, cy) in &y.terms {
            let mut vectors = vx.clone();
            vectors.extend(iy.apartment_vectors(&y.space));
            let cols: Vec<Vect> = vectors
                .iter()
                .map(|v| merged.coords_of(v).expect("vector lies in the sum"))
                .collect();
            for (idx, c) in straighten_coords(merged.field(), merged.dim(), cols) {
                out.add_term(idx, c * cx * cy);
            }
        }
    }
    Ok(out)
}

/// Action of an invertible matrix on an element of St(K^n).
pub fn gl_act(g: &DenseMat, x: &SteinbergElement) -> Result<SteinbergElement> {
    let space = &x.space;
    assert_eq!(space.dim(), space.ambient, "gl_act expects the full space");
    if g.det() == 0 {
        return Err(Error::Singular);
    }
    let mut out = SteinbergElement::zero(space.clone());
    for (idx, c) in &x.terms {
        let vectors: Vec<Vect> = idx
            .apartment_vectors(space)
            .iter()
            .map(|v| g.mul_vec(v))
            .collect();
        let moved = straighten(space, &vectors)?;
        out.add(&moved, *c);
    }
    Ok(out)
}

/// Parse an apartment symbol in the CLI text format `[a,b,...;c,d,...;...]`.
pub fn parse_symbol(field: PrimeField, text: &str) -> Result<Vec<Vect>> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("symbol `{text}` is not bracketed")))?;
    let mut vectors = Vec::new();
    for part in inner.split(';') {
        let v: Vect = part
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map(|x| field.reduce_i64(x))
                    .map_err(|_| Error::Parse(format!("bad coordinate `{t}`")))
            })
            .collect::<Result<_>>()?;
        vectors.push(v);
    }
    if vectors.iter().any(|v| v.len() != vectors[0].len()) {
        return Err(Error::Parse("ragged symbol".into()));
    }
    Ok(vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspaces::Subspace;

    fn f(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn full(q: u32, n: usize) -> Subspace {
        Subspace::full(f(q), n)
    }

    fn e(n: usize, i: usize) -> Vect {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    }

    #[test]
    fn pbw_counts() {
        assert_eq!(pbw_basis(f(7), 1).len(), 1);
        assert_eq!(pbw_basis(f(3), 2).len(), 3);
        assert_eq!(pbw_basis(f(2), 3).len(), 8);
        assert_eq!(pbw_basis(f(3), 3).len(), 27);
    }

    #[test]
    fn straighten_identity_symbol() {
        let w = full(2, 2);
        let x = straighten(&w, &[e(2, 0), e(2, 1)]).unwrap();
        assert_eq!(x.terms.len(), 1);
        assert_eq!(x.terms[&PbwIndex::identity(2)], 1);
    }

    #[test]
    fn straighten_swapped_symbol_picks_up_sign() {
        let w = full(2, 2);
        let x = straighten(&w, &[e(2, 1), e(2, 0)]).unwrap();
        assert_eq!(x.terms.len(), 1);
        assert_eq!(x.terms[&PbwIndex::identity(2)], -1);
    }

    #[test]
    fn straighten_with_one_collision() {
        // [e2, e1+e2] = [e1, e1+e2] - [e1, e2]
        let w = full(2, 2);
        let x = straighten(&w, &[e(2, 1), vec![1, 1]]).unwrap();
        let top_right_one = PbwIndex {
            dim: 2,
            entries: vec![1],
        };
        assert_eq!(x.terms[&top_right_one], 1);
        assert_eq!(x.terms[&PbwIndex::identity(2)], -1);
        assert_eq!(x.terms.len(), 2);
        assert_eq!(format!("{x}"), "+1*[1,0;1,1] -1*[1,0;0,1]");
    }

    #[test]
    fn straighten_rejects_non_bases() {
        let w = full(2, 2);
        assert!(straighten(&w, &[e(2, 0), e(2, 0)]).is_err());
        assert!(straighten(&w, &[e(2, 0)]).is_err());
    }

    #[test]
    fn scaling_a_vector_changes_nothing() {
        let w = full(3, 2);
        let a = straighten(&w, &[vec![1, 2], vec![1, 1]]).unwrap();
        let b = straighten(&w, &[vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn relation_c_holds_in_the_output() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for q in [2u32, 3] {
            let field = f(q);
            let w = full(q, 3);
            let mut tested = 0;
            while tested < 30 {
                let rand_vec =
                    |rng: &mut rand_chacha::ChaCha8Rng| -> Vect { (0..3).map(|_| rng.gen_range(0..q)).collect() };
                let v1 = rand_vec(&mut rng);
                let v2 = rand_vec(&mut rng);
                let rest = rand_vec(&mut rng);
                let v0: Vect = (0..3).map(|i| field.add(v1[i], v2[i])).collect();
                let t1 = straighten(&w, &[v1.clone(), v2.clone(), rest.clone()]);
                let t2 = straighten(&w, &[v0.clone(), v2.clone(), rest.clone()]);
                let t3 = straighten(&w, &[v0.clone(), v1.clone(), rest.clone()]);
                let (Ok(t1), Ok(t2), Ok(t3)) = (t1, t2, t3) else {
                    continue;
                };
                let mut sum = t1.clone();
                sum.add(&t2, -1);
                sum.add(&t3, 1);
                assert!(sum.terms.is_empty(), "relation (c) violated");
                tested += 1;
            }
        }
    }

    #[test]
    fn multiply_concatenates_and_straightens() {
        let field = f(2);
        let l1 = canonical_subspace(field, 2, &[e(2, 0)]).unwrap();
        let l2 = canonical_subspace(field, 2, &[e(2, 1)]).unwrap();
        let a = SteinbergElement::basis_element(l1.clone(), PbwIndex::identity(1));
        let b = SteinbergElement::basis_element(l2.clone(), PbwIndex::identity(1));
        let ab = st_multiply(&a, &b).unwrap();
        assert_eq!(ab.terms[&PbwIndex::identity(2)], 1);
        let ba = st_multiply(&b, &a).unwrap();
        assert_eq!(ba.terms[&PbwIndex::identity(2)], -1);
    }

    #[test]
    fn multiply_rejects_overlapping_spaces() {
        let field = f(2);
        let l1 = canonical_subspace(field, 2, &[e(2, 0)]).unwrap();
        let a = SteinbergElement::basis_element(l1.clone(), PbwIndex::identity(1));
        assert!(st_multiply(&a, &a).is_err());
    }

    #[test]
    fn skew_commutativity_on_random_elements() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let field = f(3);
        for _ in 0..20 {
            let mk = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vect> {
                (0..2)
                    .map(|_| (0..4).map(|_| rng.gen_range(0..3)).collect())
                    .collect()
            };
            let (vs, ws) = (mk(&mut rng), mk(&mut rng));
            let (Ok(w1), Ok(w2)) = (
                canonical_subspace(field, 4, &vs),
                canonical_subspace(field, 4, &ws),
            ) else {
                continue;
            };
            if w1.dim() != 2 || w2.dim() != 2 || direct_sum(&[w1.clone(), w2.clone()]).is_err() {
                continue;
            }
            let a = SteinbergElement::basis_element(
                w1.clone(),
                pbw_basis(field, 2)[rng.gen_range(0..3)].clone(),
            );
            let b = SteinbergElement::basis_element(
                w2.clone(),
                pbw_basis(field, 2)[rng.gen_range(0..3)].clone(),
            );
            // both factors have degree 2, so the skew sign (-1)^{2*2} is +1
            let ab = st_multiply(&a, &b).unwrap();
            let ba = st_multiply(&b, &a).unwrap();
            assert_eq!(ab, ba);
        }
    }

    #[test]
    fn gl_act_is_an_action() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let field = f(3);
        let w = full(3, 3);
        let rand_gl = |rng: &mut rand_chacha::ChaCha8Rng| -> DenseMat {
            loop {
                let cols: Vec<Vect> = (0..3)
                    .map(|_| (0..3).map(|_| rng.gen_range(0..3)).collect())
                    .collect();
                let m = DenseMat::from_columns(field, 3, &cols);
                if m.det() != 0 {
                    return m;
                }
            }
        };
        for _ in 0..10 {
            let g = rand_gl(&mut rng);
            let h = rand_gl(&mut rng);
            let x = SteinbergElement::basis_element(
                w.clone(),
                pbw_basis(field, 3)[rng.gen_range(0..27)].clone(),
            );
            let lhs = gl_act(&g, &gl_act(&h, &x).unwrap()).unwrap();
            let rhs = gl_act(&g.mul(&h), &x).unwrap();
            assert_eq!(lhs, rhs);
        }
        // identity and scaling act trivially
        let x = SteinbergElement::basis_element(w.clone(), PbwIndex::identity(3));
        assert_eq!(gl_act(&DenseMat::identity(field, 3), &x).unwrap(), x);
        let mut diag = DenseMat::identity(field, 3);
        diag.set(0, 0, 2);
        assert_eq!(gl_act(&diag, &x).unwrap(), x);
        // singular matrices are rejected
        let zero = DenseMat::zero(field, 3, 3);
        assert!(gl_act(&zero, &x).is_err());
    }

    #[test]
    fn swap_action_on_identity_pbw() {
        // g swapping e1, e2 sends [e1,e2] to [e2,e1] = -[e1,e2]
        let field = f(2);
        let w = full(2, 2);
        let x = SteinbergElement::basis_element(w.clone(), PbwIndex::identity(2));
        let mut g = DenseMat::zero(field, 2, 2);
        g.set(0, 1, 1);
        g.set(1, 0, 1);
        let gx = gl_act(&g, &x).unwrap();
        assert_eq!(gx.terms.len(), 1);
        assert_eq!(gx.terms[&PbwIndex::identity(2)], -1);
    }

    #[test]
    fn parse_symbol_round_trip() {
        let vs = parse_symbol(f(2), "[0,1;1,1]").unwrap();
        assert_eq!(vs, vec![vec![0, 1], vec![1, 1]]);
        assert!(parse_symbol(f(2), "0,1;1,1").is_err());
        assert!(parse_symbol(f(2), "[0,1;1]").is_err());
    }
}
