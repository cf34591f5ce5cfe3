//! Flat pseudo-Euclidean metrics and symmetric tensor fields with Laurent
//! polynomial components.
//!
//! Metrics are constant, symmetric, invertible rational matrices; no geodesic
//! or curvature machinery is needed because every space we work on is flat in
//! the given coordinates.  Tensor fields are stored sparsely over sorted index
//! tuples, so full symmetry is a property of the storage rather than a check.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::laurent::LaurentPoly;
use crate::algebra::linalg::RatMatrix;
use crate::algebra::rational::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("metric matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("metric matrix is not symmetric")]
    NotSymmetric,
    #[error("metric matrix is singular")]
    Singular,
}

/// Constant symmetric invertible matrix `g_ij` together with its inverse.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlatMetric {
    dim: usize,
    g: RatMatrix,
    g_inv: RatMatrix,
}

impl FlatMetric {
    pub fn new(g: RatMatrix) -> Result<Self, MetricError> {
        if g.num_rows() != g.num_cols() {
            return Err(MetricError::NotSquare { rows: g.num_rows(), cols: g.num_cols() });
        }
        if !g.is_symmetric() {
            return Err(MetricError::NotSymmetric);
        }
        let g_inv = g.inverse().ok_or(MetricError::Singular)?;
        Ok(FlatMetric { dim: g.num_rows(), g, g_inv })
    }

    pub fn euclidean(dim: usize) -> Self {
        FlatMetric::new(RatMatrix::identity(dim)).expect("identity metric")
    }

    /// Signature-(n,n)-style pairing blocks are common here, so the antidigonal
    /// pair metric gets a named constructor: `g_{i,i+half} = 1` for `i < half`.
    pub fn paired(dim: usize) -> Self {
        assert!(dim % 2 == 0, "paired metric needs even dimension");
        let half = dim / 2;
        let mut g = RatMatrix::zeros(dim, dim);
        for i in 0..half {
            g.set(i, i + half, Rational::one());
            g.set(i + half, i, Rational::one());
        }
        FlatMetric::new(g).expect("paired metric")
    }

    pub fn block_diag(a: &FlatMetric, b: &FlatMetric) -> Self {
        let dim = a.dim + b.dim;
        let mut g = RatMatrix::zeros(dim, dim);
        for i in 0..a.dim {
            for j in 0..a.dim {
                g.set(i, j, a.g.get(i, j).clone());
            }
        }
        for i in 0..b.dim {
            for j in 0..b.dim {
                g.set(a.dim + i, a.dim + j, b.g.get(i, j).clone());
            }
        }
        FlatMetric::new(g).expect("block diagonal of invertible blocks")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.g
    }

    pub fn inverse_matrix(&self) -> &RatMatrix {
        &self.g_inv
    }

    /// `g_ij`
    pub fn lo(&self, i: usize, j: usize) -> &Rational {
        self.g.get(i, j)
    }

    /// `g^ij`
    pub fn up(&self, i: usize, j: usize) -> &Rational {
        self.g_inv.get(i, j)
    }

    /// `g^{ab} d_a d_b v`
    pub fn laplacian(&self, v: &LaurentPoly) -> LaurentPoly {
        assert_eq!(v.arity(), self.dim, "arity mismatch");
        let mut acc = LaurentPoly::zero(self.dim);
        for a in 0..self.dim {
            let da = v.partial(a);
            for b in 0..self.dim {
                let gab = self.up(a, b);
                if gab.is_zero() {
                    continue;
                }
                acc = &acc + &da.partial(b).scale(gab);
            }
        }
        acc
    }
}

/// Second derivative matrix `d_i d_j v` as a symmetric degree-2 field.
pub fn hessian(v: &LaurentPoly) -> SymTensorField {
    let n = v.arity();
    let mut out = SymTensorField::zero(n, 2);
    for i in 0..n {
        let di = v.partial(i);
        for j in i..n {
            out.add_to(&[i, j], di.partial(j));
        }
    }
    out
}

/// All non-decreasing index tuples of the given length over `0..dim`.
pub fn sorted_tuples(dim: usize, degree: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(degree);
    fn rec(dim: usize, degree: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == degree {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i);
            rec(dim, degree, i, cur, out);
            cur.pop();
        }
    }
    rec(dim, degree, 0, &mut cur, &mut out);
    out
}

/// Fully symmetric covariant tensor field; components indexed by sorted
/// tuples, zero components absent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymTensorField {
    dim: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, LaurentPoly>,
}

impl SymTensorField {
    pub fn zero(dim: usize, degree: usize) -> Self {
        SymTensorField { dim, degree, comps: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn canonical(&self, idx: &[usize]) -> Vec<usize> {
        assert_eq!(idx.len(), self.degree, "index tuple has wrong length");
        assert!(idx.iter().all(|&i| i < self.dim), "index out of range");
        let mut key = idx.to_vec();
        key.sort_unstable();
        key
    }

    /// Sets the component at `idx` (any index order), dropping zeros.
    pub fn set(&mut self, idx: &[usize], value: LaurentPoly) {
        assert_eq!(value.arity(), self.dim, "component arity mismatch");
        let key = self.canonical(idx);
        if value.is_zero() {
            self.comps.remove(&key);
        } else {
            self.comps.insert(key, value);
        }
    }

    pub fn add_to(&mut self, idx: &[usize], value: LaurentPoly) {
        if value.is_zero() {
            return;
        }
        let key = self.canonical(idx);
        let cur = self.comps.remove(&key);
        let next = match cur {
            Some(p) => &p + &value,
            None => value,
        };
        if !next.is_zero() {
            self.comps.insert(key, next);
        }
    }

    pub fn get(&self, idx: &[usize]) -> Option<&LaurentPoly> {
        self.comps.get(&self.canonical(idx))
    }

    /// Component as an owned polynomial (zero when absent).
    pub fn component(&self, idx: &[usize]) -> LaurentPoly {
        self.get(idx).cloned().unwrap_or_else(|| LaurentPoly::zero(self.dim))
    }

    /// Nonzero components over sorted index tuples, in tuple order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<usize>, &LaurentPoly)> {
        self.comps.iter()
    }

    pub fn num_nonzero(&self) -> usize {
        self.comps.len()
    }

    pub fn scale(&self, c: &Rational) -> SymTensorField {
        if c.is_zero() {
            return SymTensorField::zero(self.dim, self.degree);
        }
        SymTensorField {
            dim: self.dim,
            degree: self.degree,
            comps: self.comps.iter().map(|(k, p)| (k.clone(), p.scale(c))).collect(),
        }
    }

    pub fn add(&self, other: &SymTensorField) -> SymTensorField {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (k, p) in &other.comps {
            out.add_to(k, p.clone());
        }
        out
    }

    /// Contracts the last index with `g^{-1}`:
    /// `T_{i1..id-1}{}^k = T_{i1..id-1 a} g^{ak}`.
    pub fn raise_last_index(&self, metric: &FlatMetric) -> SemiSymTensor {
        assert_eq!(self.dim, metric.dim(), "metric dimension mismatch");
        assert!(self.degree >= 1, "nothing to raise on a scalar");
        let mut out = SemiSymTensor::zero(self.dim, self.degree - 1);
        for sym in sorted_tuples(self.dim, self.degree - 1) {
            for k in 0..self.dim {
                let mut acc = LaurentPoly::zero(self.dim);
                for a in 0..self.dim {
                    let gak = metric.up(a, k);
                    if gak.is_zero() {
                        continue;
                    }
                    let mut full = sym.clone();
                    full.push(a);
                    if let Some(p) = self.get(&full) {
                        acc = &acc + &p.scale(gak);
                    }
                }
                if !acc.is_zero() {
                    out.set(&sym, k, acc);
                }
            }
        }
        out
    }

    /// Trace over two slots with the inverse metric; for degree-3 fields this
    /// is `g^{ab} C_{abk}`, returned as a degree-1 field.
    pub fn metric_trace(&self, metric: &FlatMetric) -> SymTensorField {
        assert_eq!(self.dim, metric.dim(), "metric dimension mismatch");
        assert!(self.degree >= 2, "trace needs at least two slots");
        let mut out = SymTensorField::zero(self.dim, self.degree - 2);
        for rest in sorted_tuples(self.dim, self.degree - 2) {
            let mut acc = LaurentPoly::zero(self.dim);
            for a in 0..self.dim {
                for b in 0..self.dim {
                    let gab = metric.up(a, b);
                    if gab.is_zero() {
                        continue;
                    }
                    let mut full = rest.clone();
                    full.push(a);
                    full.push(b);
                    if let Some(p) = self.get(&full) {
                        acc = &acc + &p.scale(gab);
                    }
                }
            }
            if !acc.is_zero() {
                out.set(&rest, acc);
            }
        }
        out
    }
}

/// Tensor field symmetric in a leading block of indices, with one extra
/// unconstrained slot.  Used for structure tensors `T_{(ij)k}` and their
/// raised forms `T_{(ij)}{}^k`, where the trailing slot obeys no symmetry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemiSymTensor {
    dim: usize,
    sym_degree: usize,
    comps: BTreeMap<(Vec<usize>, usize), LaurentPoly>,
}

impl SemiSymTensor {
    pub fn zero(dim: usize, sym_degree: usize) -> Self {
        SemiSymTensor { dim, sym_degree, comps: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sym_degree(&self) -> usize {
        self.sym_degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn canonical(&self, sym: &[usize], last: usize) -> (Vec<usize>, usize) {
        assert_eq!(sym.len(), self.sym_degree, "symmetric block has wrong length");
        assert!(sym.iter().all(|&i| i < self.dim) && last < self.dim, "index out of range");
        let mut key = sym.to_vec();
        key.sort_unstable();
        (key, last)
    }

    pub fn set(&mut self, sym: &[usize], last: usize, value: LaurentPoly) {
        assert_eq!(value.arity(), self.dim, "component arity mismatch");
        let key = self.canonical(sym, last);
        if value.is_zero() {
            self.comps.remove(&key);
        } else {
            self.comps.insert(key, value);
        }
    }

    pub fn get(&self, sym: &[usize], last: usize) -> Option<&LaurentPoly> {
        self.comps.get(&self.canonical(sym, last))
    }

    pub fn component(&self, sym: &[usize], last: usize) -> LaurentPoly {
        self.get(sym, last).cloned().unwrap_or_else(|| LaurentPoly::zero(self.dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<usize>, usize), &LaurentPoly)> {
        self.comps.iter()
    }

    /// Contracts the trailing slot with the inverse metric.
    pub fn raise_last(&self, metric: &FlatMetric) -> SemiSymTensor {
        assert_eq!(self.dim, metric.dim(), "metric dimension mismatch");
        let mut out = SemiSymTensor::zero(self.dim, self.sym_degree);
        for (&(ref sym, a), p) in &self.comps {
            for k in 0..self.dim {
                let gak = metric.up(a, k);
                if gak.is_zero() {
                    continue;
                }
                let mut acc = out.component(sym, k);
                acc = &acc + &p.scale(gak);
                out.set(sym, k, acc);
            }
        }
        out
    }

    /// Contracts the trailing slot with the metric (inverse of raising).
    pub fn lower_last(&self, metric: &FlatMetric) -> SemiSymTensor {
        assert_eq!(self.dim, metric.dim(), "metric dimension mismatch");
        let mut out = SemiSymTensor::zero(self.dim, self.sym_degree);
        for sym in sorted_tuples(self.dim, self.sym_degree) {
            for k in 0..self.dim {
                let mut acc = LaurentPoly::zero(self.dim);
                for a in 0..self.dim {
                    let gak = metric.lo(a, k);
                    if gak.is_zero() {
                        continue;
                    }
                    if let Some(p) = self.get(&sym, a) {
                        acc = &acc + &p.scale(gak);
                    }
                }
                if !acc.is_zero() {
                    out.set(&sym, k, acc);
                }
            }
        }
        out
    }

    /// `g^{ij} T_{(ij)k}` for a degree-(2,1) tensor: one polynomial per value
    /// of the trailing index.
    pub fn trace_sym_pair(&self, metric: &FlatMetric) -> Vec<LaurentPoly> {
        assert_eq!(self.sym_degree, 2, "pair trace needs a symmetric pair");
        (0..self.dim)
            .map(|k| {
                let mut acc = LaurentPoly::zero(self.dim);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        let gij = metric.up(i, j);
                        if gij.is_zero() {
                            continue;
                        }
                        if let Some(p) = self.get(&[i, j], k) {
                            acc = &acc + &p.scale(gij);
                        }
                    }
                }
                acc
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::laurent::ExpVec;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn x(arity: usize, i: usize) -> LaurentPoly {
        LaurentPoly::variable(arity, i)
    }

    #[test]
    fn metric_validation() {
        let mut bad = RatMatrix::zeros(2, 2);
        bad.set(0, 1, q(1, 1)); // asymmetric
        assert_eq!(FlatMetric::new(bad).unwrap_err(), MetricError::NotSymmetric);

        let singular = RatMatrix::zeros(2, 2);
        assert_eq!(FlatMetric::new(singular).unwrap_err(), MetricError::Singular);

        assert_eq!(FlatMetric::new(RatMatrix::zeros(2, 3)).unwrap_err(),
            MetricError::NotSquare { rows: 2, cols: 3 });

        let e = FlatMetric::euclidean(3);
        assert_eq!(e.up(1, 1), &q(1, 1));
        assert_eq!(e.up(0, 1), &q(0, 1));
    }

    #[test]
    fn paired_metric_is_its_own_inverse() {
        let m = FlatMetric::paired(4);
        assert_eq!(m.lo(0, 2), &q(1, 1));
        assert_eq!(m.lo(1, 3), &q(1, 1));
        assert_eq!(m.lo(0, 0), &q(0, 1));
        assert_eq!(m.up(0, 2), &q(1, 1));
        assert_eq!(m.up(2, 2), &q(0, 1));
    }

    #[test]
    fn block_diag_metric() {
        let m = FlatMetric::block_diag(&FlatMetric::paired(2), &FlatMetric::euclidean(2));
        assert_eq!(m.dim(), 4);
        assert_eq!(m.lo(0, 1), &q(1, 1));
        assert_eq!(m.lo(2, 2), &q(1, 1));
        assert_eq!(m.lo(1, 2), &q(0, 1));
        assert_eq!(m.up(0, 1), &q(1, 1));
    }

    #[test]
    fn hessian_of_cubic() {
        // v = (x2^3 + 2 x2 x4) / 2
        let v = &x(4, 1).pow(3).scale(&q(1, 2)) + &(&x(4, 1) * &x(4, 3));
        let h = hessian(&v);
        assert_eq!(h.component(&[1, 1]), x(4, 1).scale(&q(3, 1)));
        assert_eq!(h.component(&[1, 3]), LaurentPoly::one(4));
        assert_eq!(h.component(&[3, 1]), LaurentPoly::one(4)); // any index order
        assert!(h.component(&[0, 0]).is_zero());
        assert_eq!(h.num_nonzero(), 2);
    }

    #[test]
    fn laplacians_under_different_metrics() {
        // paired 4d metric: lap(x1 x3 + x2 x4) = 2 + 2 = 4
        let m = FlatMetric::paired(4);
        let v = &(&x(4, 0) * &x(4, 2)) + &(&x(4, 1) * &x(4, 3));
        assert_eq!(m.laplacian(&v), LaurentPoly::constant(4, q(4, 1)));

        // euclidean: lap(x1^-2) = 6 x1^-4
        let e1 = FlatMetric::euclidean(1);
        let inv2 = LaurentPoly::monomial(1, ExpVec(vec![-2]), q(1, 1));
        assert_eq!(
            e1.laplacian(&inv2),
            LaurentPoly::monomial(1, ExpVec(vec![-4]), q(6, 1))
        );

        // euclidean 4d: lap(sum x_j^2) = 8
        let e4 = FlatMetric::euclidean(4);
        let sq = (0..4).fold(LaurentPoly::zero(4), |acc, j| &acc + &x(4, j).pow(2));
        assert_eq!(e4.laplacian(&sq), LaurentPoly::constant(4, q(8, 1)));
    }

    #[test]
    fn symmetric_storage_canonicalizes_indices() {
        let mut t = SymTensorField::zero(3, 3);
        t.set(&[2, 0, 1], x(3, 0));
        assert_eq!(t.component(&[0, 1, 2]), x(3, 0));
        assert_eq!(t.component(&[1, 2, 0]), x(3, 0));
        assert_eq!(t.num_nonzero(), 1);
        t.add_to(&[0, 2, 1], x(3, 0).scale(&q(-1, 1)));
        assert!(t.is_zero());
    }

    #[test]
    fn raise_last_index_through_paired_metric() {
        // C_{111} = 3 under the paired 4d metric: raised slot moves to k = 3rd coord
        let m = FlatMetric::paired(4);
        let mut c = SymTensorField::zero(4, 3);
        c.set(&[0, 0, 0], LaurentPoly::constant(4, q(3, 1)));
        let raised = c.raise_last_index(&m);
        assert_eq!(raised.component(&[0, 0], 2), LaurentPoly::constant(4, q(3, 1)));
        assert!(raised.component(&[0, 0], 0).is_zero());
        // lowering again recovers the original components
        let lowered = raised.lower_last(&m);
        assert_eq!(lowered.component(&[0, 0], 0), LaurentPoly::constant(4, q(3, 1)));
        assert!(lowered.component(&[0, 0], 2).is_zero());
    }

    #[test]
    fn metric_trace_of_diagonal_cubic() {
        // C_kkk = 1/x_k, euclidean: trace_k = 1/x_k
        let e = FlatMetric::euclidean(3);
        let mut c = SymTensorField::zero(3, 3);
        for k in 0..3 {
            let mut e_vec = vec![0; 3];
            e_vec[k] = -1;
            c.set(&[k, k, k], LaurentPoly::monomial(3, ExpVec(e_vec), q(1, 1)));
        }
        let tr = c.metric_trace(&e);
        for k in 0..3 {
            let mut e_vec = vec![0; 3];
            e_vec[k] = -1;
            assert_eq!(tr.component(&[k]), LaurentPoly::monomial(3, ExpVec(e_vec), q(1, 1)));
        }
    }

    #[test]
    fn trace_sym_pair_detects_tracelessness() {
        let m = FlatMetric::euclidean(2);
        let mut t = SemiSymTensor::zero(2, 2);
        t.set(&[0, 0], 0, LaurentPoly::one(2));
        t.set(&[1, 1], 0, LaurentPoly::one(2).scale(&q(-1, 1)));
        let tr = t.trace_sym_pair(&m);
        assert!(tr[0].is_zero());
        assert!(tr[1].is_zero());
    }

    #[test]
    fn sorted_tuples_enumeration() {
        assert_eq!(sorted_tuples(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(sorted_tuples(3, 3).len(), 10); // multiset coefficient (3+2 choose 3)
        assert_eq!(sorted_tuples(4, 2).len(), 10);
    }
}
