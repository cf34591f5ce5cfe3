//! Exact linear algebra: a dense rational matrix for small problems and a
//! sparse fraction-free eliminator for the large coefficient-matching systems.
//!
//! Kernels are always read off the reduced row echelon form, so the returned
//! basis depends only on the row span and the column order — never on row
//! insertion order.  That keeps every downstream report byte-reproducible.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;

/// Sorted sparse row of integers with gcd 1 (primitive form).
type Row = Vec<(u32, BigInt)>;

fn normalize_row(mut row: Row) -> Row {
    row.retain(|(_, c)| !c.is_zero());
    if row.is_empty() {
        return row;
    }
    let mut g = BigInt::zero();
    for (_, c) in &row {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    if row[0].1.is_negative() {
        g = -g;
    }
    if !g.is_one() {
        for (_, c) in &mut row {
            *c = &*c / &g;
        }
    }
    row
}

/// `a*row_r - b*row_p`, primitive, with the shared lead column cancelled.
fn combine(r: &Row, p: &Row) -> Row {
    debug_assert_eq!(r[0].0, p[0].0, "combine requires equal lead columns");
    let g = r[0].1.gcd(&p[0].1);
    let mult_r = &p[0].1 / &g;
    let mult_p = &r[0].1 / &g;
    let mut out: Row = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let next = match (r.get(i), p.get(j)) {
            (Some((ci, vi)), Some((cj, vj))) if ci == cj => {
                let v = vi * &mult_r - vj * &mult_p;
                i += 1;
                j += 1;
                (*ci, v)
            }
            (Some((ci, vi)), Some((cj, _))) if ci < cj => {
                i += 1;
                (*ci, vi * &mult_r)
            }
            (Some(_), Some((cj, vj))) => {
                j += 1;
                (*cj, -(vj * &mult_p))
            }
            (Some((ci, vi)), None) => {
                i += 1;
                (*ci, vi * &mult_r)
            }
            (None, Some((cj, vj))) => {
                j += 1;
                (*cj, -(vj * &mult_p))
            }
            (None, None) => unreachable!(),
        };
        if !next.1.is_zero() {
            out.push(next);
        }
    }
    normalize_row(out)
}

/// Sparse integer matrix assembled row by row.  Rational rows are cleared to
/// integers on entry; only the row span matters for rank and kernel queries.
#[derive(Clone, Debug, Default)]
pub struct SparseRowMat {
    cols: usize,
    rows: Vec<Row>,
}

impl SparseRowMat {
    pub fn new(cols: usize) -> Self {
        SparseRowMat { cols, rows: Vec::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a row given as (column, value) pairs in any order.
    pub fn push_rational_row<I>(&mut self, entries: I)
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut merged: BTreeMap<u32, Rational> = BTreeMap::new();
        for (c, v) in entries {
            assert!(c < self.cols, "column {c} out of range ({} cols)", self.cols);
            let slot = merged.entry(c as u32).or_insert_with(Rational::zero);
            *slot += &v;
        }
        let mut lcm = BigInt::one();
        for v in merged.values() {
            if !v.is_zero() {
                lcm = lcm.lcm(v.denom());
            }
        }
        let row: Row = merged
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (c, v.numer() * (&lcm / v.denom())))
            .collect();
        let row = normalize_row(row);
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn push_integer_row<I>(&mut self, entries: I)
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        self.push_rational_row(
            entries.into_iter().map(|(c, v)| (c, Rational::from_int(v))),
        );
    }

    /// Reduced row echelon form as pivot-column -> row, pairwise reduced.
    fn rref(&self) -> BTreeMap<u32, Row> {
        let mut pivots: BTreeMap<u32, Row> = BTreeMap::new();
        // Short rows first: they eliminate cheaply and keep fill-in down.
        let mut work: Vec<&Row> = self.rows.iter().collect();
        work.sort_by_key(|r| (r.len(), r[0].0));
        for row in work {
            let mut row = row.clone();
            loop {
                if row.is_empty() {
                    break;
                }
                match pivots.get(&row[0].0) {
                    Some(p) => row = combine(&row, p),
                    None => {
                        pivots.insert(row[0].0, row);
                        break;
                    }
                }
            }
        }
        // Back-substitution, highest pivot first, for a true RREF.
        let cols: Vec<u32> = pivots.keys().rev().cloned().collect();
        for &pc in &cols {
            let mut row = pivots.remove(&pc).unwrap();
            let mut k = 1;
            while k < row.len() {
                let c = row[k].0;
                if let Some(p) = pivots.get(&c) {
                    // cancel column c against its pivot row
                    let g = row[k].1.gcd(&p[0].1);
                    let mult_row = &p[0].1 / &g;
                    let mult_p = &row[k].1 / &g;
                    let scaled: Row = row
                        .iter()
                        .map(|(cc, vv)| (*cc, vv * &mult_row))
                        .collect();
                    let mut merged: BTreeMap<u32, BigInt> = scaled.into_iter().collect();
                    for (cc, vv) in p {
                        let slot = merged.entry(*cc).or_insert_with(BigInt::zero);
                        *slot -= vv * &mult_p;
                    }
                    row = normalize_row(
                        merged.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
                    );
                    // restart the scan: cancellation may have shifted entries
                    k = 1;
                } else {
                    k += 1;
                }
            }
            pivots.insert(pc, row);
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().len()
    }

    /// Basis of the right kernel, one vector per free column in ascending
    /// column order.  Each vector has a 1 in its free column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (_, kernel) = self.rank_and_kernel();
        kernel
    }

    pub fn rank_and_kernel(&self) -> (usize, Vec<Vec<Rational>>) {
        let pivots = self.rref();
        let rank = pivots.len();
        let mut kernel = Vec::with_capacity(self.cols - rank);
        for free in 0..self.cols as u32 {
            if pivots.contains_key(&free) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.cols];
            v[free as usize] = Rational::one();
            for (&pc, row) in &pivots {
                if let Ok(idx) = row.binary_search_by_key(&free, |(c, _)| *c) {
                    let lead = &row[0].1;
                    v[pc as usize] =
                        Rational::from_big(-row[idx].1.clone(), lead.clone());
                }
            }
            kernel.push(v);
        }
        (rank, kernel)
    }
}

/// Greedy independence filter: rows are offered one at a time and accepted
/// exactly when they enlarge the span.  Columns are open-ended; only the
/// offer order affects which rows are kept.
#[derive(Debug, Default)]
pub struct IncrementalBasis {
    pivots: BTreeMap<u32, Row>,
}

impl IncrementalBasis {
    pub fn new() -> Self {
        IncrementalBasis::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces the row against the pivots collected so far; keeps it (and
    /// returns true) when a nonzero remainder survives.
    pub fn try_add<I>(&mut self, entries: I) -> bool
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut merged: BTreeMap<u32, Rational> = BTreeMap::new();
        for (c, v) in entries {
            let slot = merged.entry(c as u32).or_insert_with(Rational::zero);
            *slot += &v;
        }
        let mut lcm = BigInt::one();
        for v in merged.values() {
            if !v.is_zero() {
                lcm = lcm.lcm(v.denom());
            }
        }
        let row: Row = merged
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(c, v)| (c, v.numer() * (&lcm / v.denom())))
            .collect();
        let mut row = normalize_row(row);
        loop {
            if row.is_empty() {
                return false;
            }
            match self.pivots.get(&row[0].0) {
                Some(p) => row = combine(&row, p),
                None => {
                    self.pivots.insert(row[0].0, row);
                    return true;
                }
            }
        }
    }
}

/// Dense rational matrix; fine for metrics, gradients, and other small data.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn rows_vec(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows)
                .all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mat*vec");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for c in 0..self.cols {
                    if !self.get(r, c).is_zero() && !v[c].is_zero() {
                        acc += &(self.get(r, c) * &v[c]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.to_sparse().rank()
    }

    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        self.to_sparse().kernel()
    }

    fn to_sparse(&self) -> SparseRowMat {
        let mut m = SparseRowMat::new(self.cols);
        for r in 0..self.rows {
            m.push_rational_row(
                (0..self.cols)
                    .filter(|&c| !self.get(r, c).is_zero())
                    .map(|c| (c, self.get(r, c).clone())),
            );
        }
        m
    }

    /// Exact inverse by Gauss-Jordan; `None` for singular (or non-square).
    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for c in 0..n {
                    a.data.swap(col * n + c, pivot * n + c);
                    inv.data.swap(col * n + c, pivot * n + c);
                }
            }
            let scale = a.get(col, col).recip();
            for c in 0..n {
                let va = a.get(col, c) * &scale;
                a.set(col, c, va);
                let vi = inv.get(col, c) * &scale;
                inv.set(col, c, vi);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in 0..n {
                    let va = a.get(r, c) - &(&factor * a.get(col, c));
                    a.set(r, c, va);
                    let vi = inv.get(r, c) - &(&factor * inv.get(col, c));
                    inv.set(r, c, vi);
                }
            }
        }
        Some(inv)
    }
}

impl std::fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank of the span of a list of rational vectors.
pub fn span_rank(vectors: &[Vec<Rational>]) -> usize {
    let cols = vectors.first().map_or(0, |v| v.len());
    let mut m = SparseRowMat::new(cols);
    for v in vectors {
        assert_eq!(v.len(), cols, "ragged vector list");
        m.push_rational_row(
            v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())),
        );
    }
    m.rank()
}

/// Does `v` lie in the span of `basis`?  (Rank does not grow when appended.)
pub fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    let r0 = span_rank(basis);
    let mut all: Vec<Vec<Rational>> = basis.to_vec();
    all.push(v.to_vec());
    span_rank(&all) == r0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn mat(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_int(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_has_full_rank_and_empty_kernel() {
        let m = RatMatrix::identity(4);
        assert_eq!(m.rank(), 4);
        assert!(m.nullspace().is_empty());
    }

    #[test]
    fn rank_one_matrix_kernel() {
        let m = mat(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.rank(), 1);
        let kernel = m.nullspace();
        assert_eq!(kernel.len(), 1);
        // RREF kernel convention: free column x2 carries the 1
        assert_eq!(kernel[0], vec![q(-2, 1), q(1, 1)]);
    }

    #[test]
    fn kernel_vectors_are_actual_solutions() {
        let m = mat(&[&[1, 2, 3, 1], &[2, 4, 7, 1], &[1, 2, 4, 0]]);
        let kernel = m.nullspace();
        assert_eq!(m.rank() + kernel.len(), 4);
        for v in &kernel {
            assert!(m.mul_vec(v).iter().all(Rational::is_zero));
        }
    }

    #[test]
    fn kernel_is_independent_of_row_order() {
        let rows: Vec<Vec<(usize, i64)>> = vec![
            vec![(0, 2), (2, -1), (4, 3)],
            vec![(1, 1), (3, 5)],
            vec![(0, 2), (1, 1), (2, -1), (3, 5), (4, 3)],
            vec![(2, 7), (4, 2)],
        ];
        let mut fwd = SparseRowMat::new(5);
        for r in &rows {
            fwd.push_integer_row(r.clone());
        }
        let mut rev = SparseRowMat::new(5);
        for r in rows.iter().rev() {
            rev.push_integer_row(r.clone());
        }
        assert_eq!(fwd.kernel(), rev.kernel());
        assert_eq!(fwd.rank(), rev.rank());
    }

    #[test]
    fn rational_rows_are_cleared_to_integers() {
        let mut m = SparseRowMat::new(3);
        m.push_rational_row(vec![(0, q(1, 2)), (1, q(1, 3)), (2, q(-1, 6))]);
        // same line scaled by 6 must be dependent
        m.push_integer_row(vec![(0, 3), (1, 2), (2, -1)]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.kernel().len(), 2);
    }

    #[test]
    fn duplicate_and_zero_rows_are_ignored() {
        let mut m = SparseRowMat::new(2);
        m.push_integer_row(vec![(0, 1), (1, 1)]);
        m.push_integer_row(vec![(0, 2), (1, 2)]);
        m.push_integer_row(vec![]);
        m.push_rational_row(vec![(0, q(1, 1)), (0, q(-1, 1))]);
        assert_eq!(m.num_rows(), 2); // empty rows never stored
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn inverse_round_trips() {
        let m = RatMatrix::from_rows(vec![
            vec![q(0, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(2, 1)],
        ]);
        let inv = m.inverse().expect("invertible");
        assert_eq!(inv.get(2, 2), &q(1, 2));
        // m * inv = identity via mul_vec on unit vectors
        for j in 0..3 {
            let mut e = vec![Rational::zero(); 3];
            e[j] = Rational::one();
            let col = m.mul_vec(&inv.mul_vec(&e));
            assert_eq!(col, e);
        }
        assert!(mat(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn span_membership() {
        let basis = vec![
            vec![q(1, 1), q(0, 1), q(1, 1)],
            vec![q(0, 1), q(1, 1), q(1, 1)],
        ];
        assert!(in_span(&basis, &[q(2, 1), q(3, 1), q(5, 1)]));
        assert!(!in_span(&basis, &[q(0, 1), q(0, 1), q(1, 1)]));
        assert_eq!(span_rank(&basis), 2);
    }

    #[test]
    fn random_kernels_annihilate_their_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let rows = rng.gen_range(1..6);
            let cols = rng.gen_range(1..6);
            let mut dense = RatMatrix::zeros(rows, cols);
            let mut sparse = SparseRowMat::new(cols);
            for r in 0..rows {
                let mut entries = Vec::new();
                for c in 0..cols {
                    if rng.gen_bool(0.6) {
                        let v = q(rng.gen_range(-9..=9), rng.gen_range(1..=9));
                        dense.set(r, c, v.clone());
                        if !v.is_zero() {
                            entries.push((c, v));
                        }
                    }
                }
                sparse.push_rational_row(entries);
            }
            let (rank, kernel) = sparse.rank_and_kernel();
            assert_eq!(rank + kernel.len(), cols, "rank-nullity");
            assert_eq!(rank, dense.rank());
            for v in &kernel {
                assert!(dense.mul_vec(v).iter().all(Rational::is_zero));
            }
        }
    }
}
