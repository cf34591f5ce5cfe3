//! Phase-space polynomials, Poisson brackets, and independence certificates.
//!
//! Integrals of motion here are quadratic in momenta with Laurent coefficient
//! functions: `F = K^{ij} p_i p_j + W`.  Verification is symbolic — a bracket
//! `{F, H}` is expanded exactly and compared with zero — while functional
//! independence is certified numerically-but-exactly: the differentials of the
//! selected integrals are evaluated at rational sample points with nonzero
//! coordinates (so no poles can occur) and their rank is computed over the
//! rationals.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::laurent::{EvalError, ExpVec, LaurentPoly};
use crate::algebra::linalg::IncrementalBasis;
use crate::algebra::rational::Rational;
use crate::geometry::FlatMetric;
use crate::hesse::HesseFrobenius;
use crate::killing::{CompatibleSystem, KillingTensor};
use crate::potential::PotentialFamily;

/// Polynomial in momenta with Laurent-polynomial coefficients in position.
/// Keys are momentum exponent vectors (all non-negative).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhasePoly {
    dim: usize,
    terms: BTreeMap<ExpVec, LaurentPoly>,
}

impl PhasePoly {
    pub fn zero(dim: usize) -> Self {
        PhasePoly { dim, terms: BTreeMap::new() }
    }

    pub fn from_position(p: LaurentPoly) -> Self {
        let dim = p.arity();
        let mut out = PhasePoly::zero(dim);
        out.add_term(ExpVec::zeros(dim), p);
        out
    }

    pub fn momentum(dim: usize, i: usize) -> Self {
        assert!(i < dim, "momentum index out of range");
        let mut out = PhasePoly::zero(dim);
        out.add_term(ExpVec::unit(dim, i), LaurentPoly::one(dim));
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &LaurentPoly)> {
        self.terms.iter()
    }

    pub fn momentum_coefficient(&self, exps: &ExpVec) -> LaurentPoly {
        self.terms.get(exps).cloned().unwrap_or_else(|| LaurentPoly::zero(self.dim))
    }

    fn add_term(&mut self, exps: ExpVec, coeff: LaurentPoly) {
        assert_eq!(exps.arity(), self.dim, "momentum arity mismatch");
        assert!(exps.0.iter().all(|&e| e >= 0), "negative momentum exponent");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let merged = &*o.get() + &coeff;
                if merged.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = merged;
                }
            }
        }
    }

    pub fn add(&self, rhs: &PhasePoly) -> PhasePoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> PhasePoly {
        PhasePoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &PhasePoly) -> PhasePoly {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &Rational) -> PhasePoly {
        if c.is_zero() {
            return PhasePoly::zero(self.dim);
        }
        PhasePoly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, p)| (e.clone(), p.scale(c))).collect(),
        }
    }

    pub fn mul(&self, rhs: &PhasePoly) -> PhasePoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = PhasePoly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps = ExpVec(ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect());
                out.add_term(exps, ca * cb);
            }
        }
        out
    }

    /// Partial derivative in position coordinate `j`.
    pub fn dx(&self, j: usize) -> PhasePoly {
        let mut out = PhasePoly::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.partial(j));
        }
        out
    }

    /// Partial derivative in momentum coordinate `j`.
    pub fn dp(&self, j: usize) -> PhasePoly {
        let mut out = PhasePoly::zero(self.dim);
        for (e, c) in &self.terms {
            let k = e.0[j];
            if k == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps.0[j] = k - 1;
            out.add_term(exps, c.scale(&Rational::from_int(k as i64)));
        }
        out
    }

    pub fn evaluate(&self, xs: &[Rational], ps: &[Rational]) -> Result<Rational, EvalError> {
        if ps.len() != self.dim {
            return Err(EvalError::ArityMismatch { expected: self.dim, got: ps.len() });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.evaluate(xs)?;
            if term.is_zero() {
                continue;
            }
            for (j, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                if ps[j].is_zero() {
                    term = Rational::zero();
                    break;
                }
                term *= &ps[j].pow(k);
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// Highest total momentum degree.
    pub fn momentum_degree(&self) -> i64 {
        self.terms.keys().map(|e| e.total_degree()).max().unwrap_or(0)
    }
}

/// `{F, G} = sum_j dF/dx_j dG/dp_j - dG/dx_j dF/dp_j`
pub fn poisson_bracket(f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    assert_eq!(f.dim(), g.dim(), "dimension mismatch");
    let mut out = PhasePoly::zero(f.dim());
    for j in 0..f.dim() {
        out = out.add(&f.dx(j).mul(&g.dp(j)));
        out = out.sub(&g.dx(j).mul(&f.dp(j)));
    }
    out
}

/// `H = g^{ij} p_i p_j + V` (no 1/2 normalization).
pub fn build_hamiltonian(metric: &FlatMetric, v: &LaurentPoly) -> PhasePoly {
    let n = metric.dim();
    assert_eq!(v.arity(), n, "potential arity mismatch");
    let mut h = PhasePoly::from_position(v.clone());
    for i in 0..n {
        for j in i..n {
            let gij = metric.up(i, j);
            if gij.is_zero() {
                continue;
            }
            let weight = if i == j { gij.clone() } else { gij * &Rational::from_int(2) };
            let mut e = vec![0; n];
            e[i] += 1;
            e[j] += 1;
            h.add_term(ExpVec(e), LaurentPoly::constant(n, weight));
        }
    }
    h
}

/// `F = K^{ij} p_i p_j + W` with both indices of `K` raised by the metric.
pub fn build_integral(k: &KillingTensor, w: &LaurentPoly, metric: &FlatMetric) -> PhasePoly {
    let n = metric.dim();
    let mut f = PhasePoly::from_position(w.clone());
    for ([i, j], comp) in k.raised(metric) {
        let coeff = if i == j { comp } else { comp.scale(&Rational::from_int(2)) };
        let mut e = vec![0; n];
        e[i] += 1;
        e[j] += 1;
        f.add_term(ExpVec(e), coeff);
    }
    f
}

/// Rank of the differentials of `fns` at a phase-space point.
pub fn independence_rank(
    fns: &[PhasePoly],
    xs: &[Rational],
    ps: &[Rational],
) -> Result<usize, EvalError> {
    let mut basis = IncrementalBasis::new();
    let mut rank = 0;
    for f in fns {
        if gradient_extends(f, xs, ps, &mut basis)? {
            rank += 1;
        }
    }
    Ok(rank)
}

fn gradient_extends(
    f: &PhasePoly,
    xs: &[Rational],
    ps: &[Rational],
    basis: &mut IncrementalBasis,
) -> Result<bool, EvalError> {
    let n = f.dim();
    let mut entries = Vec::with_capacity(2 * n);
    for j in 0..n {
        let v = f.dx(j).evaluate(xs, ps)?;
        if !v.is_zero() {
            entries.push((j, v));
        }
        let v = f.dp(j).evaluate(xs, ps)?;
        if !v.is_zero() {
            entries.push((n + j, v));
        }
    }
    Ok(basis.try_add(entries))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertifyError {
    #[error("integral {tensor} has nonzero bracket with the Hamiltonian")]
    BracketNonzero { tensor: usize },
    #[error("family and compatible system sizes disagree")]
    ShapeMismatch,
}

/// Which integral a certificate entry refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateRef {
    Hamiltonian,
    Tensor(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub position: Vec<Rational>,
    pub momentum: Vec<Rational>,
}

/// Outcome of a certification run.  `achieved_rank == target_rank` is the
/// superintegrability certificate; a deficit is reported, not fatal.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub dim: usize,
    pub seed: u64,
    /// Random coefficients of the generic potential, one per family member.
    pub coefficients: Vec<Rational>,
    /// Every compatible tensor passed the symbolic bracket test.
    pub brackets_checked: usize,
    pub target_rank: usize,
    pub achieved_rank: usize,
    pub selected: Vec<CandidateRef>,
    pub witness: Option<Witness>,
    pub points_tried: usize,
}

impl Certificate {
    pub fn rank_achieved(&self) -> bool {
        self.achieved_rank >= self.target_rank
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let mut num = 0i64;
    while num == 0 {
        num = rng.gen_range(-9..=9);
    }
    Rational::new(num, rng.gen_range(1..=9))
}

/// Builds the generic-coefficient integrals, verifies all brackets vanish
/// symbolically, then hunts for a rational point where `2 dim - 1` of them
/// (counting the Hamiltonian) have independent differentials.
pub fn certify(
    hf: &HesseFrobenius,
    family: &PotentialFamily,
    compat: &CompatibleSystem,
    seed: u64,
) -> Result<Certificate, CertifyError> {
    let n = hf.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coefficients: Vec<Rational> =
        (0..family.dim()).map(|_| random_rational(&mut rng)).collect();

    let mut v = LaurentPoly::zero(n);
    for (c, b) in coefficients.iter().zip(family.basis()) {
        v = &v + &b.scale(c);
    }
    let h = build_hamiltonian(hf.metric(), &v);

    let mut integrals = Vec::with_capacity(compat.dim());
    for (nu, k) in compat.tensors().iter().enumerate() {
        let row = compat.companions().get(nu).ok_or(CertifyError::ShapeMismatch)?;
        if row.len() != family.dim() {
            return Err(CertifyError::ShapeMismatch);
        }
        let mut w = LaurentPoly::zero(n);
        for (c, wp) in coefficients.iter().zip(row) {
            w = &w + &wp.scale(c);
        }
        let f = build_integral(k, &w, hf.metric());
        if !poisson_bracket(&f, &h).is_zero() {
            return Err(CertifyError::BracketNonzero { tensor: nu });
        }
        integrals.push(f);
    }

    // candidate order: Hamiltonian, then momentum-diagonal tensors, then the rest
    let mut order: Vec<usize> = (0..integrals.len()).collect();
    let diagonal = |idx: usize| -> bool {
        compat.tensors()[idx]
            .raised(hf.metric())
            .keys()
            .all(|[i, j]| i == j)
    };
    order.sort_by_key(|&idx| (!diagonal(idx), idx));

    let target_rank = 2 * n - 1;
    let mut best_rank = 0;
    let mut best_selected = Vec::new();
    let mut best_witness = None;
    let mut points_tried = 0;
    for _ in 0..5 {
        points_tried += 1;
        // nonzero coordinates keep every Laurent evaluation finite
        let xs: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let ps: Vec<Rational> = (0..n).map(|_| random_rational(&mut rng)).collect();
        let mut basis = IncrementalBasis::new();
        let mut selected = Vec::new();
        if gradient_extends(&h, &xs, &ps, &mut basis).expect("nonzero point") {
            selected.push(CandidateRef::Hamiltonian);
        }
        for &idx in &order {
            if basis.rank() >= target_rank {
                break;
            }
            if gradient_extends(&integrals[idx], &xs, &ps, &mut basis).expect("nonzero point") {
                selected.push(CandidateRef::Tensor(idx));
            }
        }
        if basis.rank() > best_rank {
            best_rank = basis.rank();
            best_selected = selected;
            best_witness = Some(Witness { position: xs, momentum: ps });
        }
        if best_rank >= target_rank {
            break;
        }
    }

    Ok(Certificate {
        dim: n,
        seed,
        coefficients,
        brackets_checked: integrals.len(),
        target_rank,
        achieved_rank: best_rank,
        selected: best_selected,
        witness: best_witness,
        points_tried,
    })
}
