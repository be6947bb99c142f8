use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::field::{Coeff, PrimeField};

/// Sparse matrix with integer entries, stored column-major. All differentials
/// in the artifact have small integer entries; coefficient fields enter only
/// when a rank is taken.
#[derive(Debug, Clone, Default)]
pub struct SparseIntMat {
    pub nrows: usize,
    pub ncols: usize,
    cols: Vec<Vec<(u32, i64)>>,
}

impl SparseIntMat {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseIntMat {
            nrows,
            ncols,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn from_columns(nrows: usize, cols: Vec<Vec<(u32, i64)>>) -> Self {
        let ncols = cols.len();
        let mut m = SparseIntMat { nrows, ncols, cols };
        for col in m.cols.iter_mut() {
            col.sort_unstable_by_key(|e| e.0);
            col.retain(|e| e.1 != 0);
            debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0));
        }
        m
    }

    /// Set a column from unsorted (row, value) pairs; equal rows are summed.
    pub fn set_col(&mut self, j: usize, entries: &[(u32, i64)]) {
        let mut merged: HashMap<u32, i64> = HashMap::with_capacity(entries.len());
        for &(r, v) in entries {
            *merged.entry(r).or_insert(0) += v;
        }
        let mut col: Vec<(u32, i64)> = merged.into_iter().filter(|e| e.1 != 0).collect();
        col.sort_unstable_by_key(|e| e.0);
        self.cols[j] = col;
    }

    pub fn col(&self, j: usize) -> &[(u32, i64)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, i64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(r, v)| (r, j as u32, v)))
    }

    pub fn transpose(&self) -> SparseIntMat {
        let mut cols = vec![Vec::new(); self.nrows];
        for (r, c, v) in self.entries() {
            cols[r as usize].push((c, v));
        }
        SparseIntMat::from_columns(self.ncols, cols)
    }

    /// Reduce entries in the coefficient field, dropping zeros. Rational
    /// coefficients keep the integer entries as they are.
    fn reduced_cols(&self, k: &Coeff) -> Vec<Vec<(u32, i64)>> {
        match k {
            Coeff::Rational => self.cols.clone(),
            Coeff::Prime(p) => {
                let f = PrimeField::new(*p).expect("valid prime");
                self.cols
                    .iter()
                    .map(|col| {
                        col.iter()
                            .filter_map(|&(r, v)| {
                                let m = f.reduce_i64(v);
                                (m != 0).then_some((r, m as i64))
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    /// Exact rank over the coefficient field.
    pub fn rank(&self, k: &Coeff) -> usize {
        let cols = self.reduced_cols(k);
        let (peeled, core) = peel_singletons(self.nrows, cols);
        let core_rank = match k {
            Coeff::Prime(2) => phcol_gf2(core.nrows, core.cols_as_rows()),
            Coeff::Prime(p) => {
                let f = PrimeField::new(*p).expect("valid prime");
                let cols = core
                    .cols
                    .into_iter()
                    .map(|c| c.into_iter().map(|(r, v)| (r, v as u32)).collect())
                    .collect();
                phcol_fp(core.nrows, cols, f)
            }
            Coeff::Rational => phcol_int(core.nrows, core.cols),
        };
        peeled + core_rank
    }

    /// True when `self * rhs` vanishes over `k` (the d^2 = 0 check).
    /// On failure returns the offending column index of `rhs`.
    pub fn compose_is_zero(&self, rhs: &SparseIntMat, k: &Coeff) -> Result<(), usize> {
        assert_eq!(self.ncols, rhs.nrows);
        for j in 0..rhs.ncols {
            let mut acc: HashMap<u32, i128> = HashMap::new();
            for &(mid, v) in rhs.col(j) {
                for &(r, w) in self.col(mid as usize) {
                    *acc.entry(r).or_insert(0) += v as i128 * w as i128;
                }
            }
            let bad = match k {
                Coeff::Rational => acc.values().any(|&v| v != 0),
                Coeff::Prime(p) => acc.values().any(|&v| v.rem_euclid(*p as i128) != 0),
            };
            if bad {
                return Err(j);
            }
        }
        Ok(())
    }
}

struct Core {
    nrows: usize,
    cols: Vec<Vec<(u32, i64)>>,
}

impl Core {
    fn cols_as_rows(self) -> Vec<Vec<u32>> {
        self.cols
            .into_iter()
            .map(|c| c.into_iter().map(|(r, _)| r).collect())
            .collect()
    }
}

/// Iteratively eliminate rows and columns with a single live entry. Each such
/// pivot is fill-free, so this runs on the raw sparsity pattern and returns
/// the number of pivots plus the compacted remaining submatrix.
fn peel_singletons(nrows: usize, cols: Vec<Vec<(u32, i64)>>) -> (usize, Core) {
    let ncols = cols.len();
    let mut row_adj: Vec<Vec<u32>> = vec![Vec::new(); nrows];
    let mut row_cnt = vec![0u32; nrows];
    let mut col_cnt: Vec<u32> = cols.iter().map(|c| c.len() as u32).collect();
    for (j, col) in cols.iter().enumerate() {
        for &(r, _) in col {
            row_adj[r as usize].push(j as u32);
            row_cnt[r as usize] += 1;
        }
    }
    let mut row_live = vec![true; nrows];
    let mut col_live = vec![true; ncols];
    let mut queue: Vec<(bool, u32)> = Vec::new(); // (is_row, index)
    for r in 0..nrows {
        if row_cnt[r] == 1 {
            queue.push((true, r as u32));
        }
    }
    for c in 0..ncols {
        if col_cnt[c] == 1 {
            queue.push((false, c as u32));
        }
    }
    let mut rank = 0usize;
    while let Some((is_row, idx)) = queue.pop() {
        if is_row {
            let r = idx as usize;
            if !row_live[r] || row_cnt[r] != 1 {
                continue;
            }
            let c = row_adj[r]
                .iter()
                .map(|&j| j as usize)
                .find(|&j| col_live[j])
                .expect("live column for singleton row");
            rank += 1;
            row_live[r] = false;
            col_live[c] = false;
            for &(r2, _) in &cols[c] {
                let r2 = r2 as usize;
                if row_live[r2] {
                    row_cnt[r2] -= 1;
                    if row_cnt[r2] == 1 {
                        queue.push((true, r2 as u32));
                    }
                }
            }
        } else {
            let c = idx as usize;
            if !col_live[c] || col_cnt[c] != 1 {
                continue;
            }
            let r = cols[c]
                .iter()
                .map(|&(r, _)| r as usize)
                .find(|&r| row_live[r])
                .expect("live row for singleton column");
            rank += 1;
            row_live[r] = false;
            col_live[c] = false;
            for &j in &row_adj[r] {
                let j = j as usize;
                if col_live[j] {
                    col_cnt[j] -= 1;
                    if col_cnt[j] == 1 {
                        queue.push((false, j as u32));
                    }
                }
            }
        }
    }
    // compact what is left
    let mut row_map = vec![u32::MAX; nrows];
    let mut live_rows = 0u32;
    for r in 0..nrows {
        if row_live[r] {
            row_map[r] = live_rows;
            live_rows += 1;
        }
    }
    let mut out_cols = Vec::new();
    for (j, col) in cols.into_iter().enumerate() {
        if !col_live[j] {
            continue;
        }
        let filtered: Vec<(u32, i64)> = col
            .into_iter()
            .filter(|&(r, _)| row_live[r as usize])
            .map(|(r, v)| (row_map[r as usize], v))
            .collect();
        if !filtered.is_empty() {
            out_cols.push(filtered);
        }
    }
    (
        rank,
        Core {
            nrows: live_rows as usize,
            cols: out_cols,
        },
    )
}

/// Left-looking column reduction over F_p: each column is reduced against the
/// stored column sharing its lowest row until it dies or becomes a new pivot.
/// Stored pivot columns are normalized so their lowest entry is 1.
fn phcol_fp(nrows: usize, mut cols: Vec<Vec<(u32, u32)>>, f: PrimeField) -> usize {
    let _ = nrows;
    cols.sort_unstable_by_key(|c| c.len());
    let mut pivot_of_low: HashMap<u32, usize> = HashMap::new();
    let mut stored: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut rank = 0usize;
    for col in cols {
        let mut cur = col;
        loop {
            let Some(&(low, low_val)) = cur.last() else {
                break;
            };
            match pivot_of_low.get(&low) {
                Some(&j) => {
                    cur = sub_scaled_fp(&cur, &stored[j], low_val, f);
                }
                None => {
                    let inv = f.inv(low_val).expect("nonzero low");
                    if inv != 1 {
                        for e in cur.iter_mut() {
                            e.1 = f.mul(e.1, inv);
                        }
                    }
                    pivot_of_low.insert(low, stored.len());
                    stored.push(cur);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn sub_scaled_fp(a: &[(u32, u32)], b: &[(u32, u32)], factor: u32, f: PrimeField) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, f.neg(f.mul(factor, b[j].1))));
            j += 1;
        } else {
            let v = f.sub(a[i].1, f.mul(factor, b[j].1));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// GF(2) columns: sparse sorted row lists that densify into bitsets once they
/// stop being sparse. The dense threshold is memory-neutral (a bitset costs
/// nrows/8 bytes, a sparse entry 4 bytes).
enum Gf2Col {
    Sparse(Vec<u32>),
    /// `low` caches the highest set bit; `None` means the column is zero.
    Dense { words: Vec<u64>, low: Option<u32> },
}

impl Gf2Col {
    fn low(&self) -> Option<u32> {
        match self {
            Gf2Col::Sparse(v) => v.last().copied(),
            Gf2Col::Dense { low, .. } => *low,
        }
    }

    fn densify(v: &[u32], nrows: usize) -> Gf2Col {
        let mut words = vec![0u64; nrows.div_ceil(64)];
        for &r in v {
            words[(r / 64) as usize] ^= 1u64 << (r % 64);
        }
        Gf2Col::Dense {
            words,
            low: v.last().copied(),
        }
    }
}

fn dense_rescan_low(words: &[u64], from: u32) -> Option<u32> {
    let mut w = (from / 64) as usize;
    loop {
        if words[w] != 0 {
            return Some(w as u32 * 64 + 63 - words[w].leading_zeros());
        }
        if w == 0 {
            return None;
        }
        w -= 1;
    }
}

fn phcol_gf2(nrows: usize, mut cols: Vec<Vec<u32>>) -> usize {
    let threshold = (nrows / 32).max(64);
    cols.sort_unstable_by_key(|c| c.len());
    let mut pivot_of_low: HashMap<u32, usize> = HashMap::new();
    let mut stored: Vec<Gf2Col> = Vec::new();
    let mut rank = 0usize;
    for col in cols {
        let mut cur = if col.len() > threshold {
            Gf2Col::densify(&col, nrows)
        } else {
            Gf2Col::Sparse(col)
        };
        loop {
            let Some(low) = cur.low() else { break };
            let Some(&j) = pivot_of_low.get(&low) else {
                pivot_of_low.insert(low, stored.len());
                stored.push(cur);
                rank += 1;
                break;
            };
            match (&mut cur, &stored[j]) {
                (Gf2Col::Sparse(a), Gf2Col::Sparse(b)) => {
                    let merged = xor_merge(a, b);
                    cur = if merged.len() > threshold {
                        Gf2Col::densify(&merged, nrows)
                    } else {
                        Gf2Col::Sparse(merged)
                    };
                }
                (Gf2Col::Sparse(a), Gf2Col::Dense { words, .. }) => {
                    let mut w = words.clone();
                    for &r in a.iter() {
                        w[(r / 64) as usize] ^= 1u64 << (r % 64);
                    }
                    let new_low = dense_rescan_low(&w, low);
                    cur = Gf2Col::Dense { words: w, low: new_low };
                }
                (Gf2Col::Dense { words, low: l }, Gf2Col::Sparse(b)) => {
                    for &r in b.iter() {
                        words[(r / 64) as usize] ^= 1u64 << (r % 64);
                    }
                    *l = dense_rescan_low(words, low);
                }
                (Gf2Col::Dense { words, low: l }, Gf2Col::Dense { words: bw, .. }) => {
                    for (x, y) in words.iter_mut().zip(bw.iter()) {
                        *x ^= *y;
                    }
                    *l = dense_rescan_low(words, low);
                }
            }
        }
    }
    rank
}

fn xor_merge(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out
}

/// Fraction-free reduction over the integers: columns stay primitive (content
/// one); a reduction step is (s/g)*cur - (c/g)*stored followed by a content
/// strip, so intermediate growth stays bounded by minors of the input.
/// Runs in i128 and escalates to BigInt only if an overflow check trips.
fn phcol_int(nrows: usize, cols: Vec<Vec<(u32, i64)>>) -> usize {
    let as_i128: Vec<Vec<(u32, i128)>> = cols
        .iter()
        .map(|c| c.iter().map(|&(r, v)| (r, v as i128)).collect())
        .collect();
    match phcol_int_i128(as_i128) {
        Some(rank) => rank,
        None => {
            let big: Vec<Vec<(u32, BigInt)>> = cols
                .iter()
                .map(|c| c.iter().map(|&(r, v)| (r, BigInt::from(v))).collect())
                .collect();
            phcol_int_big(nrows, big)
        }
    }
}

fn phcol_int_i128(mut cols: Vec<Vec<(u32, i128)>>) -> Option<usize> {
    for col in cols.iter_mut() {
        strip_content_i128(col);
    }
    cols.sort_unstable_by_key(|c| c.len());
    let mut pivot_of_low: HashMap<u32, usize> = HashMap::new();
    let mut stored: Vec<Vec<(u32, i128)>> = Vec::new();
    let mut rank = 0usize;
    for col in cols {
        let mut cur = col;
        loop {
            let Some(&(low, c_val)) = cur.last() else { break };
            let Some(&j) = pivot_of_low.get(&low) else {
                strip_content_i128(&mut cur);
                pivot_of_low.insert(low, stored.len());
                stored.push(cur);
                rank += 1;
                break;
            };
            let s_val = stored[j].last().expect("pivot nonzero").1;
            let g = gcd_i128(s_val, c_val);
            let (a, b) = (s_val / g, c_val / g);
            cur = sub_scaled_i128(&cur, &stored[j], a, b)?;
            strip_content_i128(&mut cur);
        }
    }
    Some(rank)
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

fn strip_content_i128(col: &mut [(u32, i128)]) {
    let mut g: i128 = 0;
    for &(_, v) in col.iter() {
        g = gcd_i128(g, v);
        if g == 1 {
            return;
        }
    }
    if g > 1 {
        for e in col.iter_mut() {
            e.1 /= g;
        }
    }
}

/// cur*a - stored*b, entries merged by row; None on overflow.
fn sub_scaled_i128(
    cur: &[(u32, i128)],
    stored: &[(u32, i128)],
    a: i128,
    b: i128,
) -> Option<Vec<(u32, i128)>> {
    let mut out = Vec::with_capacity(cur.len() + stored.len());
    let (mut i, mut j) = (0, 0);
    while i < cur.len() || j < stored.len() {
        if j == stored.len() || (i < cur.len() && cur[i].0 < stored[j].0) {
            out.push((cur[i].0, cur[i].1.checked_mul(a)?));
            i += 1;
        } else if i == cur.len() || stored[j].0 < cur[i].0 {
            out.push((stored[j].0, stored[j].1.checked_mul(b)?.checked_neg()?));
            j += 1;
        } else {
            let v = cur[i].1.checked_mul(a)?.checked_sub(stored[j].1.checked_mul(b)?)?;
            if v != 0 {
                out.push((cur[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

fn phcol_int_big(nrows: usize, mut cols: Vec<Vec<(u32, BigInt)>>) -> usize {
    let _ = nrows;
    for col in cols.iter_mut() {
        strip_content_big(col);
    }
    cols.sort_unstable_by_key(|c| c.len());
    let mut pivot_of_low: HashMap<u32, usize> = HashMap::new();
    let mut stored: Vec<Vec<(u32, BigInt)>> = Vec::new();
    let mut rank = 0usize;
    for col in cols {
        let mut cur = col;
        loop {
            let Some((low, c_val)) = cur.last().map(|e| (e.0, e.1.clone())) else {
                break;
            };
            let Some(&j) = pivot_of_low.get(&low) else {
                strip_content_big(&mut cur);
                pivot_of_low.insert(low, stored.len());
                stored.push(cur);
                rank += 1;
                break;
            };
            let s_val = stored[j].last().expect("pivot nonzero").1.clone();
            let g = s_val.gcd(&c_val).max(BigInt::from(1));
            let a = &s_val / &g;
            let b = &c_val / &g;
            cur = sub_scaled_big(&cur, &stored[j], &a, &b);
            strip_content_big(&mut cur);
        }
    }
    rank
}

fn strip_content_big(col: &mut [(u32, BigInt)]) {
    let mut g = BigInt::zero();
    for (_, v) in col.iter() {
        g = g.gcd(v);
    }
    if g > BigInt::from(1) {
        for e in col.iter_mut() {
            e.1 = &e.1 / &g;
        }
    }
}

fn sub_scaled_big(
    cur: &[(u32, BigInt)],
    stored: &[(u32, BigInt)],
    a: &BigInt,
    b: &BigInt,
) -> Vec<(u32, BigInt)> {
    let mut out = Vec::with_capacity(cur.len() + stored.len());
    let (mut i, mut j) = (0, 0);
    while i < cur.len() || j < stored.len() {
        if j == stored.len() || (i < cur.len() && cur[i].0 < stored[j].0) {
            out.push((cur[i].0, &cur[i].1 * a));
            i += 1;
        } else if i == cur.len() || stored[j].0 < cur[i].0 {
            out.push((stored[j].0, -(&stored[j].1 * b)));
            j += 1;
        } else {
            let v = &cur[i].1 * a - &stored[j].1 * b;
            if !v.is_zero() {
                out.push((cur[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
