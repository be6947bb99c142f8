//! Lines, subspaces in canonical echelon form, the `precedes` order on pivot
//! sets, and enumeration of lines, subspaces, complements and ordered
//! direct-sum decompositions of F_q^n.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exactla::{reduced_column_echelon, DenseMat, PrimeField};

pub type Vect = Vec<u32>;

/// A line in F_q^n, normalized so the entry at its level (the bottom-most
/// nonzero coordinate) is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    pub coords: Vect,
}

impl Line {
    pub fn new(field: PrimeField, v: &[u32]) -> Result<Self> {
        let level = v
            .iter()
            .rposition(|&x| x % field.modulus() != 0)
            .ok_or(Error::ZeroSpan)?;
        let inv = field.inv(v[level] % field.modulus())?;
        let coords = v.iter().map(|&x| field.mul(x % field.modulus(), inv)).collect();
        Ok(Line { coords })
    }

    /// Index of the bottom-most nonzero coordinate (0-based).
    pub fn level(&self) -> usize {
        self.coords.iter().rposition(|&x| x != 0).expect("nonzero")
    }

    pub fn ambient(&self) -> usize {
        self.coords.len()
    }
}

/// A subspace of F_q^n held in reduced column echelon form. `pivots` is the
/// pivot row set S_W (0-based, sorted) and `basis` the ordered columns B_W.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: Vec<Vect>,
    pub pivots: Vec<usize>,
    q: u32,
}

impl Subspace {
    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.q).expect("stored modulus is valid")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
            q: field.modulus(),
        }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Subspace {
            ambient,
            basis,
            pivots: (0..ambient).collect(),
            q: field.modulus(),
        }
    }

    pub fn basis_matrix(&self) -> DenseMat {
        DenseMat::from_columns(self.field(), self.ambient, &self.basis)
    }

    /// Coordinates of `v` with respect to B_W, or None when `v` is outside.
    /// Because pivot rows of the echelon form carry an identity block, the
    /// candidate coordinates are just the pivot entries of `v`.
    pub fn coords_of(&self, v: &[u32]) -> Option<Vect> {
        let f = self.field();
        let cand: Vect = self.pivots.iter().map(|&r| v[r] % f.modulus()).collect();
        let rebuilt = self.basis_matrix().mul_vec(&cand);
        let matches = rebuilt
            .iter()
            .zip(v.iter())
            .all(|(&a, &b)| a == b % f.modulus());
        matches.then_some(cand)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.coords_of(v).is_some()
    }

    /// Map a vector given in B_W coordinates back to ambient coordinates.
    pub fn from_coords(&self, c: &[u32]) -> Vect {
        self.basis_matrix().mul_vec(c)
    }
}

/// Span of the given vectors as a canonical subspace.
pub fn canonical_subspace(field: PrimeField, ambient: usize, vectors: &[Vect]) -> Result<Subspace> {
    if vectors.is_empty() {
        return Err(Error::ZeroSpan);
    }
    let m = DenseMat::from_columns(field, ambient, vectors);
    let (n, pivots) = reduced_column_echelon(&m);
    if pivots.is_empty() {
        return Err(Error::ZeroSpan);
    }
    Ok(Subspace {
        ambient,
        basis: n.columns(),
        pivots,
        q: field.modulus(),
    })
}

/// S1 precedes S2 when max S1 < min S2; empty sets compare vacuously true.
pub fn precedes(s1: &[usize], s2: &[usize]) -> bool {
    match (s1.last(), s2.first()) {
        (Some(&max1), Some(&min2)) => max1 < min2,
        _ => true,
    }
}

/// Direct sum of subspaces in a common ambient space; errors when the
/// dimensions do not add up.
pub fn direct_sum(parts: &[Subspace]) -> Result<Subspace> {
    let first = parts.first().ok_or(Error::ZeroSpan)?;
    let field = first.field();
    let ambient = first.ambient;
    let mut vectors = Vec::new();
    let mut expected = 0;
    for p in parts {
        assert_eq!(p.ambient, ambient, "mixed ambient spaces");
        expected += p.dim();
        vectors.extend(p.basis.iter().cloned());
    }
    let sum = canonical_subspace(field, ambient, &vectors)?;
    if sum.dim() != expected {
        return Err(Error::NotDirect {
            got: sum.dim(),
            expected,
        });
    }
    Ok(sum)
}

/// All lines of F_q^n, level-normalized and sorted lexicographically.
pub fn enumerate_lines(field: PrimeField, n: usize) -> Vec<Line> {
    assert!(n >= 1);
    let q = field.modulus();
    let mut out = Vec::new();
    for level in 0..n {
        // entries below `level` are free, entry at `level` is 1, rest 0
        let mut free = vec![0u32; level];
        loop {
            let mut coords = vec![0u32; n];
            coords[..level].copy_from_slice(&free);
            coords[level] = 1;
            out.push(Line { coords });
            if !increment(&mut free, q) {
                break;
            }
        }
    }
    out.sort();
    out
}

fn increment(digits: &mut [u32], q: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

/// All d-dimensional subspaces of F_q^n, enumerated through their reduced
/// column echelon forms (pivot set choice plus free entries).
pub fn enumerate_subspaces(field: PrimeField, n: usize, d: usize) -> Vec<Subspace> {
    let q = field.modulus();
    let mut out = Vec::new();
    if d == 0 {
        return vec![Subspace::zero(field, n)];
    }
    if d > n {
        return out;
    }
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        // free positions: rows below each pivot that are not pivots themselves
        let mut free_pos = Vec::new();
        for (j, &p) in pivots.iter().enumerate() {
            for r in p + 1..n {
                if !pivots.contains(&r) {
                    free_pos.push((r, j));
                }
            }
        }
        let mut vals = vec![0u32; free_pos.len()];
        loop {
            let mut basis = vec![vec![0u32; n]; d];
            for (j, &p) in pivots.iter().enumerate() {
                basis[j][p] = 1;
            }
            for (&(r, j), &v) in free_pos.iter().zip(vals.iter()) {
                basis[j][r] = v;
            }
            out.push(Subspace {
                ambient: n,
                basis,
                pivots: pivots.clone(),
                q,
            });
            if !increment(&mut vals, q) {
                break;
            }
        }
        if !next_combination(&mut pivots, n) {
            break;
        }
    }
    out
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - (k - i) {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All complements of `w` inside `inside` (both subspaces of the same ambient
/// space, `w` contained in `inside`). Complements are graphs of linear maps
/// from a fixed complement, which makes their count q^{d(m-d)} immediate.
pub fn enumerate_complements(w: &Subspace, inside: &Subspace) -> Vec<Subspace> {
    let field = w.field();
    let q = field.modulus();
    let m = inside.dim();
    let d = w.dim();
    assert!(d <= m);
    // work in B_{inside} coordinates
    let w_in: Vec<Vect> = w
        .basis
        .iter()
        .map(|v| inside.coords_of(v).expect("w inside `inside`"))
        .collect();
    let w_local = canonical_subspace(field, m, &w_in).expect("nonzero")
        ;
    let nonpivot: Vec<usize> = (0..m).filter(|r| !w_local.pivots.contains(r)).collect();
    debug_assert_eq!(nonpivot.len(), m - d);
    let mut out = Vec::new();
    let mut phi = vec![0u32; (m - d) * d];
    loop {
        let cols: Vec<Vect> = nonpivot
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let mut v = vec![0u32; m];
                v[r] = 1;
                for (j, wcol) in w_local.basis.iter().enumerate() {
                    let c = phi[i * d + j];
                    if c != 0 {
                        for t in 0..m {
                            v[t] = field.add(v[t], field.mul(c, wcol[t]));
                        }
                    }
                }
                inside.from_coords(&v)
            })
            .collect();
        if m == d {
            out.push(Subspace::zero(field, w.ambient));
        } else {
            out.push(canonical_subspace(field, w.ambient, &cols).expect("complement is nonzero"));
        }
        if m == d || !increment(&mut phi, q) {
            break;
        }
    }
    out
}

/// An ordered direct-sum decomposition of F_q^n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Decomposition {
    pub parts: Vec<Subspace>,
}

impl Decomposition {
    pub fn new(parts: Vec<Subspace>) -> Result<Self> {
        let sum = direct_sum(&parts)?;
        let n = parts[0].ambient;
        if sum.dim() != n {
            return Err(Error::NotDirect {
                got: sum.dim(),
                expected: n,
            });
        }
        Ok(Decomposition { parts })
    }

    pub fn ambient(&self) -> usize {
        self.parts[0].ambient
    }

    /// Concatenation of the internally sorted pivot sets, the filtration word.
    pub fn word(&self) -> Vec<u8> {
        let mut w = Vec::with_capacity(self.ambient());
        for p in &self.parts {
            w.extend(p.pivots.iter().map(|&r| r as u8));
        }
        w
    }
}

/// All ordered tuples of subspaces with the given dimensions whose direct sum
/// is all of F_q^n.
pub fn enumerate_decompositions(
    field: PrimeField,
    n: usize,
    shape: &[usize],
) -> Vec<Decomposition> {
    assert!(shape.iter().all(|&d| d >= 1));
    assert_eq!(shape.iter().sum::<usize>(), n);
    let full = Subspace::full(field, n);
    let mut out = Vec::new();
    let mut acc = Vec::new();
    rec_decompose(field, &full, shape, &mut acc, &mut out);
    out
}

fn rec_decompose(
    field: PrimeField,
    inside: &Subspace,
    shape: &[usize],
    acc: &mut Vec<Subspace>,
    out: &mut Vec<Decomposition>,
) {
    if shape.len() == 1 {
        assert_eq!(inside.dim(), shape[0]);
        acc.push(inside.clone());
        out.push(Decomposition { parts: acc.clone() });
        acc.pop();
        return;
    }
    let d = shape[0];
    for w_local in enumerate_subspaces(field, inside.dim(), d) {
        let w_cols: Vec<Vect> = w_local
            .basis
            .iter()
            .map(|c| inside.from_coords(c))
            .collect();
        let w = canonical_subspace(field, inside.ambient, &w_cols).expect("nonzero part");
        for c in enumerate_complements(&w, inside) {
            acc.push(w.clone());
            rec_decompose(field, &c, &shape[1..], acc, out);
            acc.pop();
        }
    }
}

/// |GL_n(F_q)| as an exact big integer.
pub fn gl_order(n: usize, q: u32) -> BigUint {
    let q = BigUint::from(q);
    let qn = num_traits::pow::pow(q.clone(), n);
    let mut acc = BigUint::one();
    let mut qi = BigUint::one();
    for _ in 0..n {
        acc *= &qn - &qi;
        qi *= &q;
    }
    acc
}

/// Gaussian binomial [n choose d]_q via the q-factorial formula.
pub fn gaussian_binomial(n: usize, d: usize, q: u32) -> BigUint {
    if d > n {
        return BigUint::from(0u32);
    }
    let q = BigUint::from(q);
    let qint = |m: usize| -> BigUint {
        // 1 + q + ... + q^{m-1}
        let mut acc = BigUint::from(0u32);
        let mut p = BigUint::one();
        for _ in 0..m {
            acc += &p;
            p *= &q;
        }
        acc
    };
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d {
        num *= qint(n - i);
        den *= qint(i + 1);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn canonical_subspace_of_paper_example() {
        // span of (1,2,0,0), (0,0,1,0), (0,0,0,1) in F_q^4 has S_W = {1,3,4}
        let vs = vec![vec![1, 2, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]];
        let w = canonical_subspace(f(3), 4, &vs).unwrap();
        assert_eq!(w.pivots, vec![0, 2, 3]);
        assert_eq!(w.basis, vs);
    }

    #[test]
    fn canonical_subspace_of_standard_basis() {
        let vs: Vec<Vect> = (0..3)
            .map(|i| {
                let mut v = vec![0; 3];
                v[i] = 1;
                v
            })
            .collect();
        let w = canonical_subspace(f(5), 3, &vs).unwrap();
        assert_eq!(w, Subspace::full(f(5), 3));
    }

    #[test]
    fn canonical_subspace_echelons_f2_pair() {
        let w = canonical_subspace(f(2), 2, &[vec![0, 1], vec![1, 1]]).unwrap();
        assert_eq!(w.basis, vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn zero_span_is_an_error() {
        assert!(canonical_subspace(f(2), 3, &[vec![0, 0, 0]]).is_err());
    }

    #[test]
    fn canonical_subspace_ignores_presentation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let field = f(3);
        for _ in 0..50 {
            let vs: Vec<Vect> = (0..3)
                .map(|_| (0..4).map(|_| rng.gen_range(0..3)).collect())
                .collect();
            let Ok(w) = canonical_subspace(field, 4, &vs) else {
                continue;
            };
            // permute and rescale
            let mut vs2 = vs.clone();
            vs2.reverse();
            for v in vs2.iter_mut() {
                for x in v.iter_mut() {
                    *x = field.mul(*x, 2);
                }
            }
            let w2 = canonical_subspace(field, 4, &vs2).unwrap();
            assert_eq!(w, w2);
        }
    }

    #[test]
    fn precedes_examples() {
        assert!(precedes(&[0, 1], &[2, 3]));
        assert!(!precedes(&[0, 2], &[1, 3]));
        assert!(precedes(&[], &[0]));
        assert!(precedes(&[5], &[]));
    }

    #[test]
    fn direct_sum_examples() {
        let field = f(3);
        let e1 = canonical_subspace(field, 3, &[vec![1, 0, 0]]).unwrap();
        let e2 = canonical_subspace(field, 3, &[vec![0, 1, 0]]).unwrap();
        let plane = direct_sum(&[e1.clone(), e2]).unwrap();
        assert_eq!(plane.pivots, vec![0, 1]);
        assert!(direct_sum(&[e1.clone(), e1]).is_err());
    }

    #[test]
    fn property_p1_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let field = f(3);
        let mut checked = 0;
        while checked < 40 {
            let vs: Vec<Vect> = (0..2)
                .map(|_| (0..4).map(|_| rng.gen_range(0..3)).collect())
                .collect();
            let ws: Vec<Vect> = (0..2)
                .map(|_| (0..4).map(|_| rng.gen_range(0..3)).collect())
                .collect();
            let (Ok(w1), Ok(w2)) = (
                canonical_subspace(field, 4, &vs),
                canonical_subspace(field, 4, &ws),
            ) else {
                continue;
            };
            if !precedes(&w1.pivots, &w2.pivots) {
                continue;
            }
            let Ok(sum) = direct_sum(&[w1.clone(), w2.clone()]) else {
                continue;
            };
            let mut expect = w1.pivots.clone();
            expect.extend(&w2.pivots);
            assert_eq!(sum.pivots, expect, "property (P1)");
            checked += 1;
        }
    }

    #[test]
    fn line_counts() {
        assert_eq!(enumerate_lines(f(3), 2).len(), 4);
        assert_eq!(enumerate_lines(f(2), 3).len(), 7);
        assert_eq!(enumerate_lines(f(5), 1).len(), 1);
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(2, 2), BigUint::from(6u32));
        assert_eq!(gl_order(2, 3), BigUint::from(48u32));
        assert_eq!(gl_order(4, 3), BigUint::from(24261120u32));
    }

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for (n, q) in [(3usize, 2u32), (4, 2), (3, 3)] {
            for d in 0..=n {
                let count = enumerate_subspaces(f(q), n, d).len();
                assert_eq!(
                    BigUint::from(count),
                    gaussian_binomial(n, d, q),
                    "n={n} d={d} q={q}"
                );
            }
        }
    }

    #[test]
    fn decomposition_counts() {
        // n=2, shape (1,1): 6 over F_2, 12 over F_3
        assert_eq!(enumerate_decompositions(f(2), 2, &[1, 1]).len(), 6);
        assert_eq!(enumerate_decompositions(f(3), 2, &[1, 1]).len(), 12);
        // group-order identity on a few shapes
        for (q, n, shape) in [
            (2u32, 3usize, vec![1, 2]),
            (2, 3, vec![1, 1, 1]),
            (3, 3, vec![2, 1]),
            (2, 4, vec![2, 2]),
        ] {
            let count = enumerate_decompositions(f(q), n, &shape).len();
            let mut denom = BigUint::one();
            for &d in &shape {
                denom *= gl_order(d, q);
            }
            assert_eq!(BigUint::from(count) * denom, gl_order(n, q));
        }
    }

    #[test]
    fn complement_count_in_f3() {
        let field = f(3);
        let w = canonical_subspace(field, 4, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        let full = Subspace::full(field, 4);
        let comps = enumerate_complements(&w, &full);
        assert_eq!(comps.len(), 81); // q^{d(n-d)} = 3^4
        for c in &comps {
            assert_eq!(direct_sum(&[w.clone(), c.clone()]).unwrap().dim(), 4);
        }
    }

    #[test]
    fn words_concatenate_pivot_sets() {
        let field = f(2);
        let w1 = canonical_subspace(field, 3, &[vec![1, 0, 0]]).unwrap();
        let w2 = canonical_subspace(field, 3, &[vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let d = Decomposition::new(vec![w2.clone(), w1.clone()]).unwrap();
        assert_eq!(d.word(), vec![1, 2, 0]);
    }
}
