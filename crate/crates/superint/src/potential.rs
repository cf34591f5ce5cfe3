//! The potential equation and its exact solver.
//!
//! A verified structure determines a second-order system for scalar
//! potentials,
//!
//! ```text
//! d_i d_j V  =  T_ij^k d_k V  +  g_ij (lap V) / n ,
//! ```
//!
//! whose solution space is the potential family of the system.  Solving is
//! linear algebra: expand `V` over all Laurent monomials inside an exponent
//! window, match coefficients of the residual monomial by monomial, and read
//! the family off the kernel.  Abundant structures have families of dimension
//! `n + 2`; the window only needs to be large enough to contain them.

use thiserror::Error;

use crate::algebra::laurent::{ExpVec, LaurentPoly};
use crate::algebra::linalg::SparseRowMat;
use crate::algebra::rational::Rational;
use crate::geometry::{hessian, sorted_tuples, FlatMetric, SymTensorField};
use crate::hesse::{HesseFrobenius, StructurePair};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WindowError {
    #[error("window bounds have lengths {lo} and {hi}, expected both = {dim}")]
    BadLength { dim: usize, lo: usize, hi: usize },
    #[error("window has lo > hi in coordinate {0}")]
    EmptyRange(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("window is for dimension {window} but structure has dimension {dim}")]
    WindowDimension { dim: usize, window: usize },
}

/// Per-coordinate exponent bounds plus a bound on the sum of absolute
/// exponents.  The ansatz is every Laurent monomial inside the box that
/// respects the total bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentWindow {
    lo: Vec<i32>,
    hi: Vec<i32>,
    degree_cap: u32,
}

impl ExponentWindow {
    pub fn new(lo: Vec<i32>, hi: Vec<i32>, degree_cap: u32) -> Result<Self, WindowError> {
        if lo.len() != hi.len() {
            return Err(WindowError::BadLength { dim: lo.len(), lo: lo.len(), hi: hi.len() });
        }
        for (j, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if l > h {
                return Err(WindowError::EmptyRange(j));
            }
        }
        Ok(ExponentWindow { lo, hi, degree_cap })
    }

    pub fn uniform(dim: usize, lo: i32, hi: i32, degree_cap: u32) -> Result<Self, WindowError> {
        ExponentWindow::new(vec![lo; dim], vec![hi; dim], degree_cap)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i32] {
        &self.lo
    }

    pub fn hi(&self) -> &[i32] {
        &self.hi
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn contains(&self, e: &ExpVec) -> bool {
        e.arity() == self.dim()
            && e.abs_degree() <= self.degree_cap
            && e.0.iter().zip(&self.lo).all(|(&v, &l)| v >= l)
            && e.0.iter().zip(&self.hi).all(|(&v, &h)| v <= h)
    }

    /// Every admissible exponent vector, in canonical monomial order.
    pub fn monomials(&self) -> Vec<ExpVec> {
        let n = self.dim();
        let mut out = Vec::new();
        let mut cur = vec![0i32; n];
        fn rec(
            w: &ExponentWindow,
            coord: usize,
            used: u32,
            cur: &mut Vec<i32>,
            out: &mut Vec<ExpVec>,
        ) {
            if coord == w.dim() {
                out.push(ExpVec(cur.clone()));
                return;
            }
            for v in w.lo[coord]..=w.hi[coord] {
                let cost = v.unsigned_abs();
                if used + cost > w.degree_cap {
                    continue;
                }
                cur[coord] = v;
                rec(w, coord + 1, used + cost, cur, out);
                cur[coord] = 0;
            }
        }
        rec(self, 0, 0, &mut cur, &mut out);
        out.sort();
        out
    }
}

/// Window adapted to a structure: coordinates where the raised structure
/// tensor has poles admit exponents down to -2; everything else stays
/// polynomial.  Upper bound 3 and total bound 4 cover the abundant families.
pub fn default_window(hf: &HesseFrobenius) -> ExponentWindow {
    let n = hf.dim();
    let pair = hf.structure_tensor();
    let mut lo = vec![0i32; n];
    for (_, poly) in pair.t_hat.iter() {
        for j in 0..n {
            if poly.min_exponent(j) < 0 {
                lo[j] = -2;
            }
        }
    }
    ExponentWindow::new(lo, vec![3; n], 4).expect("default window is well formed")
}

/// Left-hand side minus right-hand side of the potential equation, one
/// component per unordered index pair.  Identically zero exactly when `v`
/// solves the system.
pub fn wilczynski_residual(hf: &HesseFrobenius, v: &LaurentPoly) -> SymTensorField {
    wilczynski_residual_with(&hf.structure_tensor(), hf.metric(), v)
}

/// Same residual with a precomputed structure tensor, for callers evaluating
/// many potentials against one structure.
pub fn wilczynski_residual_with(
    pair: &StructurePair,
    metric: &FlatMetric,
    v: &LaurentPoly,
) -> SymTensorField {
    let n = metric.dim();
    assert_eq!(v.arity(), n, "potential arity mismatch");
    let grads: Vec<LaurentPoly> = (0..n).map(|k| v.partial(k)).collect();
    let hess = hessian(v);
    let mut lap = LaurentPoly::zero(n);
    for a in 0..n {
        for b in a..n {
            let gab = metric.up(a, b);
            if gab.is_zero() {
                continue;
            }
            // off-diagonal entries enter the trace twice
            let weight = if a == b { gab.clone() } else { gab * &Rational::from_int(2) };
            lap = &lap + &hess.component(&[a, b]).scale(&weight);
        }
    }
    let inv_n = Rational::new(1, n as i64);
    let mut out = SymTensorField::zero(n, 2);
    for idx in sorted_tuples(n, 2) {
        let (i, j) = (idx[0], idx[1]);
        let mut r = hess.component(&[i, j]);
        for (k, grad) in grads.iter().enumerate() {
            if grad.is_zero() {
                continue;
            }
            if let Some(t) = pair.t_hat.get(&[i, j], k) {
                r = &r - &(t * grad);
            }
        }
        let gij = metric.lo(i, j);
        if !gij.is_zero() {
            r = &r - &lap.scale(&(gij * &inv_n));
        }
        out.set(&idx, r);
    }
    out
}

/// Basis of the solution space of the potential equation inside a window.
#[derive(Debug, Clone)]
pub struct PotentialFamily {
    window: ExponentWindow,
    basis: Vec<LaurentPoly>,
}

impl PotentialFamily {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[LaurentPoly] {
        &self.basis
    }

    pub fn window(&self) -> &ExponentWindow {
        &self.window
    }

    pub fn space_dim(&self) -> usize {
        self.window.dim()
    }

    /// Span membership over monomial coefficients.
    pub fn contains(&self, v: &LaurentPoly) -> bool {
        use std::collections::BTreeMap;
        let mut cols: BTreeMap<ExpVec, usize> = BTreeMap::new();
        for p in self.basis.iter().chain(std::iter::once(v)) {
            for (e, _) in p.terms() {
                let next = cols.len();
                cols.entry(e.clone()).or_insert(next);
            }
        }
        let vectorize = |p: &LaurentPoly| -> Vec<Rational> {
            let mut row = vec![Rational::zero(); cols.len()];
            for (e, c) in p.terms() {
                row[cols[e]] = c.clone();
            }
            row
        };
        let basis_vecs: Vec<Vec<Rational>> = self.basis.iter().map(vectorize).collect();
        crate::algebra::linalg::in_span(&basis_vecs, &vectorize(v))
    }
}

/// Solves the potential equation by exact coefficient matching over the
/// window's monomials.  The returned basis is canonical: it is the reduced
/// echelon kernel of the residual system under the monomial order.
pub fn solve_potentials(
    hf: &HesseFrobenius,
    window: &ExponentWindow,
) -> Result<PotentialFamily, SolveError> {
    let n = hf.dim();
    if window.dim() != n {
        return Err(SolveError::WindowDimension { dim: n, window: window.dim() });
    }
    let pair = hf.structure_tensor();
    let ansatz = window.monomials();
    let mut rows: std::collections::BTreeMap<(usize, usize, ExpVec), Vec<(usize, Rational)>> =
        std::collections::BTreeMap::new();
    for (col, e) in ansatz.iter().enumerate() {
        let mono = LaurentPoly::monomial(n, e.clone(), Rational::one());
        let residual = wilczynski_residual_with(&pair, hf.metric(), &mono);
        for (idx, poly) in residual.iter() {
            for (re, rc) in poly.terms() {
                rows.entry((idx[0], idx[1], re.clone()))
                    .or_default()
                    .push((col, rc.clone()));
            }
        }
    }
    let mut system = SparseRowMat::new(ansatz.len());
    for (_, entries) in rows {
        system.push_rational_row(entries);
    }
    let kernel = system.kernel();
    let basis = kernel
        .into_iter()
        .map(|coeffs| {
            LaurentPoly::from_terms(
                n,
                ansatz
                    .iter()
                    .zip(coeffs)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(e, c)| (e.clone(), c)),
            )
        })
        .collect();
    Ok(PotentialFamily { window: window.clone(), basis })
}

/// How a product family decomposes over contiguous coordinate blocks.
#[derive(Debug, Clone)]
pub struct SeparationReport {
    pub family_dim: usize,
    pub block_dims: Vec<usize>,
    /// Monomials in the basis whose support touches more than one block.
    pub mixed_monomials: Vec<ExpVec>,
    /// `sum_f (n_f + 2) - family_dim`; gluing identifies one constant and one
    /// quadratic generator per extra factor, so `2 (k - 1)` is the abundant
    /// value for `k` blocks.
    pub deficit: i64,
}

impl SeparationReport {
    pub fn is_separated(&self) -> bool {
        self.mixed_monomials.is_empty()
    }

    pub fn expected_deficit(&self) -> i64 {
        2 * (self.block_dims.len() as i64 - 1)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("blocks sum to {got}, family lives in dimension {expected}")]
pub struct BlockMismatch {
    pub expected: usize,
    pub got: usize,
}

/// Splits the coordinates into contiguous blocks of the given sizes and
/// reports whether the family separates (no basis monomial mixes blocks)
/// together with the dimension bookkeeping.
pub fn check_separation(
    family: &PotentialFamily,
    blocks: &[usize],
) -> Result<SeparationReport, BlockMismatch> {
    let n = family.space_dim();
    let total: usize = blocks.iter().sum();
    if total != n {
        return Err(BlockMismatch { expected: n, got: total });
    }
    let mut owner = vec![0usize; n];
    let mut start = 0;
    for (b, &size) in blocks.iter().enumerate() {
        for j in start..start + size {
            owner[j] = b;
        }
        start += size;
    }
    let mut mixed = std::collections::BTreeSet::new();
    for v in family.basis() {
        for (e, _) in v.terms() {
            let mut touched: Option<usize> = None;
            let mut is_mixed = false;
            for (j, &exp) in e.0.iter().enumerate() {
                if exp == 0 {
                    continue;
                }
                match touched {
                    None => touched = Some(owner[j]),
                    Some(b) if b != owner[j] => {
                        is_mixed = true;
                        break;
                    }
                    _ => {}
                }
            }
            if is_mixed {
                mixed.insert(e.clone());
            }
        }
    }
    let expected: i64 = blocks.iter().map(|&b| b as i64 + 2).sum();
    Ok(SeparationReport {
        family_dim: family.dim(),
        block_dims: blocks.to_vec(),
        mixed_monomials: mixed.into_iter().collect(),
        deficit: expected - family.dim() as i64,
    })
}
