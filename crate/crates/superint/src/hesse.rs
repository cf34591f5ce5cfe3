//! Hesse-Frobenius structures: a flat metric plus a fully symmetric cubic
//! tensor field subject to two axioms, checked exactly.
//!
//! Writing `C^k_ij = C_ija g^{ak}` for the raised cubic, the axioms are
//!
//! * associativity (WDVV): `C_ija g^{ab} C_klb = C_ika g^{ab} C_jlb`
//!   for all index choices — the frame product `e_i * e_j = C^k_ij e_k`
//!   is associative;
//! * the differential condition: `d_l C_ijk = C_ija g^{ab} C_klb`.
//!
//! Both reduce to comparisons of one precomputed four-index field
//! `P_ijkl = C_ija g^{ab} C_klb`, which is symmetric within each pair.
//! Full symmetry of `C` itself is a storage invariant; raw component lists
//! (where symmetry can genuinely fail) are vetted by [`assemble_cubic`].

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::algebra::laurent::{ExpVec, LaurentPoly};
use crate::algebra::rational::Rational;
use crate::geometry::{sorted_tuples, FlatMetric, SemiSymTensor, SymTensorField};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("cubic tensor has dimension {cubic} but metric has dimension {metric}")]
    DimensionMismatch { metric: usize, cubic: usize },
    #[error("cubic tensor must have degree 3, got {0}")]
    WrongDegree(usize),
    #[error("semisimple structures need dimension >= 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("mask has {mask} entries for dimension {dim}")]
    MaskLength { dim: usize, mask: usize },
}

/// A pair of raw component entries that disagree after symmetrization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryConflict {
    pub first: [usize; 3],
    pub second: [usize; 3],
}

/// Builds a fully symmetric cubic field from raw `(indices, component)`
/// entries, failing if two entries related by an index permutation disagree.
/// This is the symmetry axiom check for untrusted input.
pub fn assemble_cubic(
    dim: usize,
    entries: &[([usize; 3], LaurentPoly)],
) -> Result<SymTensorField, Vec<SymmetryConflict>> {
    let mut field = SymTensorField::zero(dim, 3);
    let mut seen: BTreeMap<Vec<usize>, [usize; 3]> = BTreeMap::new();
    let mut conflicts = Vec::new();
    for (idx, poly) in entries {
        let mut key = idx.to_vec();
        key.sort_unstable();
        match seen.get(&key) {
            Some(prev) => {
                if field.get(&key) != Some(poly) && !(poly.is_zero() && field.get(&key).is_none()) {
                    conflicts.push(SymmetryConflict { first: *prev, second: *idx });
                }
            }
            None => {
                seen.insert(key.clone(), *idx);
                field.set(idx, poly.clone());
            }
        }
    }
    if conflicts.is_empty() {
        Ok(field)
    } else {
        Err(conflicts)
    }
}

/// Outcome of the axiom suite.  Failures carry the offending index tuples
/// (zero-based) so reports can point at concrete components.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub symmetry_conflicts: Vec<SymmetryConflict>,
    pub wdvv_failures: Vec<[usize; 4]>,
    pub differential_failures: Vec<[usize; 4]>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.symmetry_conflicts.is_empty()
            && self.wdvv_failures.is_empty()
            && self.differential_failures.is_empty()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return write!(f, "all axioms hold");
        }
        if !self.symmetry_conflicts.is_empty() {
            writeln!(f, "symmetry conflicts: {}", self.symmetry_conflicts.len())?;
        }
        if !self.wdvv_failures.is_empty() {
            let show: Vec<String> = self
                .wdvv_failures
                .iter()
                .take(5)
                .map(|t| format!("({},{},{},{})", t[0] + 1, t[1] + 1, t[2] + 1, t[3] + 1))
                .collect();
            writeln!(
                f,
                "associativity fails at {} index tuples, e.g. {}",
                self.wdvv_failures.len(),
                show.join(" ")
            )?;
        }
        if !self.differential_failures.is_empty() {
            let show: Vec<String> = self
                .differential_failures
                .iter()
                .take(5)
                .map(|t| format!("({},{},{},{})", t[0] + 1, t[1] + 1, t[2] + 1, t[3] + 1))
                .collect();
            writeln!(
                f,
                "differential condition fails at {} index tuples, e.g. {}",
                self.differential_failures.len(),
                show.join(" ")
            )?;
        }
        Ok(())
    }
}

/// The traceless structure tensor `T` derived from a verified structure,
/// together with its raised form.
///
/// `T_ijk = 3 (C_ijk - g_ij tr_k / n)` with `tr_k = g^{ab} C_abk` is
/// symmetric in `(i, j)` only — the trailing slot genuinely differs — and is
/// trace-free over the symmetric pair.  `t_hat` carries `T_ij{}^k`.
#[derive(Clone, Debug)]
pub struct StructurePair {
    pub t: SemiSymTensor,
    pub t_hat: SemiSymTensor,
}

#[derive(Clone, Debug)]
pub struct HesseFrobenius {
    metric: FlatMetric,
    cubic: SymTensorField,
}

impl HesseFrobenius {
    /// Wraps the data after shape validation.  Axioms are *not* checked here;
    /// call [`HesseFrobenius::check_axioms`].
    pub fn new(metric: FlatMetric, cubic: SymTensorField) -> Result<Self, StructureError> {
        if cubic.degree() != 3 {
            return Err(StructureError::WrongDegree(cubic.degree()));
        }
        if cubic.dim() != metric.dim() {
            return Err(StructureError::DimensionMismatch {
                metric: metric.dim(),
                cubic: cubic.dim(),
            });
        }
        Ok(HesseFrobenius { metric, cubic })
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &FlatMetric {
        &self.metric
    }

    pub fn cubic(&self) -> &SymTensorField {
        &self.cubic
    }

    /// `P_ijkl = C_ija g^{ab} C_klb`, keyed by the two sorted pairs.
    /// Zero components are absent.
    fn pair_product(&self) -> BTreeMap<([usize; 2], [usize; 2]), LaurentPoly> {
        let n = self.dim();
        let raised = self.cubic.raise_last_index(&self.metric);
        let mut out = BTreeMap::new();
        for ((ij, b), chat) in raised.iter() {
            for kl in sorted_tuples(n, 2) {
                let mut full = kl.clone();
                full.push(*b);
                if let Some(c) = self.cubic.get(&full) {
                    let key = ([ij[0], ij[1]], [kl[0], kl[1]]);
                    let entry = out.remove(&key).unwrap_or_else(|| LaurentPoly::zero(n));
                    let next = &entry + &(chat * c);
                    if next.is_zero() {
                        out.remove(&key);
                    } else {
                        out.insert(key, next);
                    }
                }
            }
        }
        out
    }

    fn pair_lookup<'a>(
        p: &'a BTreeMap<([usize; 2], [usize; 2]), LaurentPoly>,
        mut a: [usize; 2],
        mut b: [usize; 2],
    ) -> Option<&'a LaurentPoly> {
        a.sort_unstable();
        b.sort_unstable();
        // P is symmetric under swapping the two pairs
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        p.get(&(a, b)).or_else(|| p.get(&(b, a)))
    }

    /// Associativity of the frame product, checked as
    /// `P_ijkl = P_ikjl` for all indices (reported with `j < k`; the swap
    /// only changes the sign of the discrepancy).
    pub fn check_wdvv(&self) -> AxiomReport {
        let n = self.dim();
        let p = self.pair_product();
        let zero = LaurentPoly::zero(n);
        let mut report = AxiomReport::default();
        for i in 0..n {
            for j in 0..n {
                for k in j + 1..n {
                    for l in 0..n {
                        let lhs = Self::pair_lookup(&p, [i, j], [k, l]).unwrap_or(&zero);
                        let rhs = Self::pair_lookup(&p, [i, k], [j, l]).unwrap_or(&zero);
                        if lhs != rhs {
                            report.wdvv_failures.push([i, j, k, l]);
                        }
                    }
                }
            }
        }
        report
    }

    /// `d_l C_ijk = P_ijkl` for every split of `(i,j,k)` into a pair and a
    /// trailing index, and every `l`.  All splits matter: the right-hand side
    /// is only pair-symmetric once the axioms already hold.
    pub fn check_differential(&self) -> AxiomReport {
        let n = self.dim();
        let p = self.pair_product();
        let zero = LaurentPoly::zero(n);
        let mut report = AxiomReport::default();
        for triple in sorted_tuples(n, 3) {
            let (a, b, c) = (triple[0], triple[1], triple[2]);
            let splits = [([a, b], c), ([a, c], b), ([b, c], a)];
            let deriv_base = self.cubic.component(&triple);
            for l in 0..n {
                let lhs = deriv_base.partial(l);
                for (pair, single) in splits {
                    let rhs = Self::pair_lookup(&p, pair, [single, l]).unwrap_or(&zero);
                    if &lhs != rhs {
                        report.differential_failures.push([pair[0], pair[1], single, l]);
                    }
                }
            }
        }
        report.differential_failures.sort_unstable();
        report.differential_failures.dedup();
        report
    }

    /// Runs the whole axiom suite.  Symmetry holds by storage invariant for
    /// values built through [`assemble_cubic`] or the tensor API, so that
    /// section is empty here.
    pub fn check_axioms(&self) -> AxiomReport {
        let mut report = self.check_wdvv();
        report
            .differential_failures
            .extend(self.check_differential().differential_failures);
        report
    }

    /// Components of the frame product `e_i * e_j = C_ija g^{ak} e_k`.
    pub fn star_frame(&self, i: usize, j: usize) -> Vec<LaurentPoly> {
        let raised = self.cubic.raise_last_index(&self.metric);
        (0..self.dim()).map(|k| raised.component(&[i, j], k)).collect()
    }

    /// The traceless tensor driving the potential equation, plus its raised
    /// form.  `g^{ij} T_ijk = 0` holds identically by construction.
    pub fn structure_tensor(&self) -> StructurePair {
        let n = self.dim();
        let trace = self.cubic.metric_trace(&self.metric);
        let three = Rational::from_int(3);
        let mut t = SemiSymTensor::zero(n, 2);
        for pair in sorted_tuples(n, 2) {
            let (i, j) = (pair[0], pair[1]);
            let gij = self.metric.lo(i, j).clone();
            for k in 0..n {
                let mut full = pair.clone();
                full.push(k);
                let mut v = self.cubic.component(&full).scale(&three);
                if !gij.is_zero() {
                    let w = &(&gij * &three) / &Rational::from_int(n as i64);
                    v = &v - &trace.component(&[k]).scale(&w);
                }
                if !v.is_zero() {
                    t.set(&pair, k, v);
                }
            }
        }
        let t_hat = t.raise_last(&self.metric);
        StructurePair { t, t_hat }
    }
}

/// Structure whose cubic is the third derivative of a potential function.
/// Shape-checked only; axioms still need verification.
pub fn from_frobenius_potential(
    phi: &LaurentPoly,
    metric: &FlatMetric,
) -> Result<HesseFrobenius, StructureError> {
    let n = metric.dim();
    if phi.arity() != n {
        return Err(StructureError::DimensionMismatch { metric: n, cubic: phi.arity() });
    }
    let mut cubic = SymTensorField::zero(n, 3);
    for i in 0..n {
        let di = phi.partial(i);
        for j in i..n {
            let dij = di.partial(j);
            for k in j..n {
                cubic.set(&[i, j, k], dij.partial(k));
            }
        }
    }
    HesseFrobenius::new(metric.clone(), cubic)
}

/// Diagonal family on Euclidean space: `C_jjj = -1/x_j` for every coordinate
/// selected by the mask, everything else zero.  The sign makes the
/// differential axiom an identity (`d/dx (-1/x) = (-1/x)^2`); only
/// `dimension >= 3` yields the abundant behaviour downstream.
pub fn semisimple_structure(n: usize, mask: &[bool]) -> Result<HesseFrobenius, StructureError> {
    if n < 3 {
        return Err(StructureError::DimensionTooSmall(n));
    }
    if mask.len() != n {
        return Err(StructureError::MaskLength { dim: n, mask: mask.len() });
    }
    let metric = FlatMetric::euclidean(n);
    let mut cubic = SymTensorField::zero(n, 3);
    for (j, &on) in mask.iter().enumerate() {
        if on {
            let mut e = vec![0; n];
            e[j] = -1;
            cubic.set(&[j, j, j], LaurentPoly::monomial(n, ExpVec(e), Rational::from_int(-1)));
        }
    }
    HesseFrobenius::new(metric, cubic)
}

/// Direct sum of two structures: block metric, no cross components in the
/// cubic.  Both axioms survive gluing because every `P_ijkl` term needs all
/// four indices in one block.
pub fn glue(a: &HesseFrobenius, b: &HesseFrobenius) -> HesseFrobenius {
    let na = a.dim();
    let n = na + b.dim();
    let metric = FlatMetric::block_diag(a.metric(), b.metric());
    let mut cubic = SymTensorField::zero(n, 3);
    for (idx, poly) in a.cubic().iter() {
        cubic.set(idx, poly.embed(n, 0));
    }
    for (idx, poly) in b.cubic().iter() {
        let shifted: Vec<usize> = idx.iter().map(|&i| i + na).collect();
        cubic.set(&shifted, poly.embed(n, na));
    }
    HesseFrobenius::new(metric, cubic).expect("blocks were valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn x(arity: usize, i: usize) -> LaurentPoly {
        LaurentPoly::variable(arity, i)
    }

    fn inv_x(arity: usize, i: usize, coeff: Rational) -> LaurentPoly {
        let mut e = vec![0; arity];
        e[i] = -1;
        LaurentPoly::monomial(arity, ExpVec(e), coeff)
    }

    /// phi = (x1^3 + x2^3)/6 on the paired 4d metric.
    fn nilpotent4d() -> HesseFrobenius {
        let phi = &x(4, 0).pow(3).scale(&q(1, 6)) + &x(4, 1).pow(3).scale(&q(1, 6));
        from_frobenius_potential(&phi, &FlatMetric::paired(4)).unwrap()
    }

    #[test]
    fn cubic_from_potential_has_constant_components() {
        let hf = nilpotent4d();
        assert_eq!(hf.cubic().component(&[0, 0, 0]), LaurentPoly::one(4));
        assert_eq!(hf.cubic().component(&[1, 1, 1]), LaurentPoly::one(4));
        assert_eq!(hf.cubic().num_nonzero(), 2);
    }

    #[test]
    fn nilpotent_structure_satisfies_axioms() {
        let report = nilpotent4d().check_axioms();
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn semisimple_satisfies_axioms_for_every_mask() {
        for bits in 0..(1u32 << 3) {
            let mask: Vec<bool> = (0..3).map(|i| bits & (1 << i) != 0).collect();
            let hf = semisimple_structure(3, &mask).unwrap();
            assert!(hf.check_axioms().passed(), "mask {mask:?}");
        }
    }

    #[test]
    fn semisimple_needs_three_dimensions() {
        assert_eq!(
            semisimple_structure(2, &[true, true]).unwrap_err(),
            StructureError::DimensionTooSmall(2)
        );
        assert!(matches!(
            semisimple_structure(3, &[true, true]),
            Err(StructureError::MaskLength { dim: 3, mask: 2 })
        ));
    }

    #[test]
    fn positive_reciprocal_diagonal_breaks_only_the_differential_axiom() {
        // C_kkk = +1/x_k has d(1/x) = -1/x^2 but P = +1/x^2
        let metric = FlatMetric::euclidean(3);
        let mut cubic = SymTensorField::zero(3, 3);
        for k in 0..3 {
            cubic.set(&[k, k, k], inv_x(3, k, q(1, 1)));
        }
        let hf = HesseFrobenius::new(metric, cubic).unwrap();
        assert!(hf.check_wdvv().passed());
        let report = hf.check_differential();
        assert!(!report.passed());
        assert!(report.differential_failures.contains(&[0, 0, 0, 0]));
    }

    #[test]
    fn wdvv_failure_is_located() {
        // C_112 = 1 on euclidean 2d: P_1212 = 1 but P_1122 = 0
        let metric = FlatMetric::euclidean(2);
        let mut cubic = SymTensorField::zero(2, 3);
        cubic.set(&[0, 0, 1], LaurentPoly::one(2));
        let hf = HesseFrobenius::new(metric, cubic).unwrap();
        let report = hf.check_wdvv();
        assert!(report.wdvv_failures.contains(&[0, 0, 1, 1]));
    }

    #[test]
    fn structure_tensor_of_semisimple_diagonal() {
        // with C_kkk = -1/x_k: T_kkk = -(9/4)/x_k, T_iik = +(3/4)/x_k, T_kii = 0
        let hf = semisimple_structure(4, &[true; 4]).unwrap();
        let pair = hf.structure_tensor();
        for k in 0..4 {
            assert_eq!(pair.t.component(&[k, k], k), inv_x(4, k, q(-9, 4)));
            for i in 0..4 {
                if i == k {
                    continue;
                }
                assert_eq!(pair.t.component(&[i, i], k), inv_x(4, k, q(3, 4)));
                assert!(pair.t.component(&[k, i], i).is_zero());
            }
        }
        // euclidean metric: raised tensor has identical components
        assert_eq!(pair.t_hat.component(&[0, 0], 0), inv_x(4, 0, q(-9, 4)));
    }

    #[test]
    fn structure_tensor_is_trace_free() {
        for hf in [nilpotent4d(), semisimple_structure(4, &[true, true, true, false]).unwrap()] {
            let pair = hf.structure_tensor();
            for p in pair.t.trace_sym_pair(hf.metric()) {
                assert!(p.is_zero());
            }
        }
    }

    #[test]
    fn raised_structure_tensor_through_paired_metric() {
        // T_111 = 3 C_111 = 3 (metric trace of C vanishes); raising sends slot 1 -> 3
        let hf = nilpotent4d();
        let pair = hf.structure_tensor();
        assert_eq!(pair.t.component(&[0, 0], 0), LaurentPoly::constant(4, q(3, 1)));
        assert_eq!(pair.t_hat.component(&[0, 0], 2), LaurentPoly::constant(4, q(3, 1)));
        assert!(pair.t_hat.component(&[0, 0], 0).is_zero());
    }

    #[test]
    fn star_frame_product_matches_raised_cubic() {
        let hf = semisimple_structure(3, &[true; 3]).unwrap();
        let e0 = hf.star_frame(0, 0);
        assert_eq!(e0[0], inv_x(3, 0, q(-1, 1)));
        assert!(e0[1].is_zero() && e0[2].is_zero());
        assert!(hf.star_frame(0, 1).iter().all(LaurentPoly::is_zero));
    }

    #[test]
    fn gluing_offsets_blocks_and_preserves_axioms() {
        let a = nilpotent4d();
        let b = semisimple_structure(3, &[true; 3]).unwrap();
        let ab = glue(&a, &b);
        assert_eq!(ab.dim(), 7);
        assert_eq!(ab.cubic().component(&[0, 0, 0]), LaurentPoly::one(7));
        assert_eq!(ab.cubic().component(&[4, 4, 4]), inv_x(7, 4, q(-1, 1)));
        assert_eq!(ab.metric().lo(0, 2), &q(1, 1));
        assert_eq!(ab.metric().lo(4, 4), &q(1, 1));
        assert_eq!(ab.metric().lo(3, 4), &q(0, 1));
        assert!(ab.check_axioms().passed());
    }

    #[test]
    fn assemble_cubic_flags_asymmetric_input() {
        let entries = vec![
            ([0usize, 1, 2], x(3, 0)),
            ([1usize, 0, 2], x(3, 1)), // same unordered triple, different value
        ];
        let conflicts = assemble_cubic(3, &entries).unwrap_err();
        assert_eq!(conflicts.len(), 1);
        assert_eq!(conflicts[0].first, [0, 1, 2]);
        assert_eq!(conflicts[0].second, [1, 0, 2]);

        let ok = assemble_cubic(3, &[([2usize, 1, 0], x(3, 0)), ([0usize, 1, 2], x(3, 0))]);
        assert!(ok.is_ok());
    }

    #[test]
    fn perturbing_a_component_breaks_an_axiom() {
        let hf = semisimple_structure(3, &[true; 3]).unwrap();
        let mut cubic = hf.cubic().clone();
        let bump = &cubic.component(&[0, 1, 2]) + &x(3, 0).pow(2).scale(&q(5, 3));
        cubic.set(&[0, 1, 2], bump);
        let mutated = HesseFrobenius::new(hf.metric().clone(), cubic).unwrap();
        assert!(!mutated.check_axioms().passed());
    }
}
