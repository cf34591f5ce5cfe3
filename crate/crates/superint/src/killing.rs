//! Killing tensors of flat metrics and their compatibility with a potential
//! family.
//!
//! Valence-2 Killing tensors are stored covariantly; for constant metrics the
//! Killing equation `d_i K_jk + d_j K_ki + d_k K_ij = 0` does not involve the
//! metric at all, and the full solution space is spanned by symmetrized
//! products of the flat-space Killing one-forms `dx_a` and
//! `x_a dx_b - x_b dx_a`.  Its dimension is `n (n+1)^2 (n+2) / 12`.
//!
//! A Killing tensor is compatible with a potential `V` when the one-form
//! `omega_i = K_i{}^a d_a V` is closed; then the companion potential `W` with
//! `dW = omega` completes `K^{ij} p_i p_j + W` to an integral of motion.
//! Compatibility with a whole family is a linear condition, solved once per
//! system by coefficient matching.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::laurent::{ExpVec, LaurentPoly};
use crate::algebra::linalg::{IncrementalBasis, SparseRowMat};
use crate::algebra::rational::Rational;
use crate::geometry::{sorted_tuples, FlatMetric};
use crate::hesse::HesseFrobenius;
use crate::potential::PotentialFamily;

/// Symmetric covariant 2-tensor with polynomial components, `i <= j` keys.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KillingTensor {
    dim: usize,
    comps: BTreeMap<[usize; 2], LaurentPoly>,
}

impl KillingTensor {
    pub fn zero(dim: usize) -> Self {
        KillingTensor { dim, comps: BTreeMap::new() }
    }

    /// The metric itself is always a Killing tensor (its integral is `H - V + W`).
    pub fn from_metric(metric: &FlatMetric) -> Self {
        let n = metric.dim();
        let mut k = KillingTensor::zero(n);
        for i in 0..n {
            for j in i..n {
                let v = metric.lo(i, j);
                if !v.is_zero() {
                    k.set(i, j, LaurentPoly::constant(n, v.clone()));
                }
            }
        }
        k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn set(&mut self, i: usize, j: usize, value: LaurentPoly) {
        assert!(i < self.dim && j < self.dim, "index out of range");
        assert_eq!(value.arity(), self.dim, "component arity mismatch");
        let key = [i.min(j), i.max(j)];
        if value.is_zero() {
            self.comps.remove(&key);
        } else {
            self.comps.insert(key, value);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&LaurentPoly> {
        self.comps.get(&[i.min(j), i.max(j)])
    }

    pub fn component(&self, i: usize, j: usize) -> LaurentPoly {
        self.get(i, j).cloned().unwrap_or_else(|| LaurentPoly::zero(self.dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize; 2], &LaurentPoly)> {
        self.comps.iter()
    }

    pub fn add_scaled(&mut self, other: &KillingTensor, c: &Rational) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if c.is_zero() {
            return;
        }
        for (&[i, j], p) in &other.comps {
            let cur = self.component(i, j);
            self.set(i, j, &cur + &p.scale(c));
        }
    }

    /// Mixed components `K_i{}^a = K_ib g^{ba}` as a full (non-symmetric) grid.
    fn mixed(&self, metric: &FlatMetric) -> Vec<Vec<LaurentPoly>> {
        let n = self.dim;
        let mut out = vec![vec![LaurentPoly::zero(n); n]; n];
        for (&[i, j], p) in &self.comps {
            for a in 0..n {
                let gja = metric.up(j, a);
                if !gja.is_zero() {
                    out[i][a] = &out[i][a] + &p.scale(gja);
                }
                if i != j {
                    let gia = metric.up(i, a);
                    if !gia.is_zero() {
                        out[j][a] = &out[j][a] + &p.scale(gia);
                    }
                }
            }
        }
        out
    }

    /// Fully raised components `K^{ij} = g^{ia} g^{jb} K_ab`, `i <= j` keys.
    pub fn raised(&self, metric: &FlatMetric) -> BTreeMap<[usize; 2], LaurentPoly> {
        let n = self.dim;
        let mixed = self.mixed(metric);
        let mut out = BTreeMap::new();
        for i in 0..n {
            for j in i..n {
                let mut acc = LaurentPoly::zero(n);
                for a in 0..n {
                    let gia = metric.up(i, a);
                    if !gia.is_zero() {
                        acc = &acc + &mixed[a][j].scale(gia);
                    }
                }
                if !acc.is_zero() {
                    out.insert([i, j], acc);
                }
            }
        }
        out
    }

    /// Sparse vectorization over `(component pair, monomial)` keys.
    fn rows(&self) -> Vec<((usize, usize, ExpVec), Rational)> {
        let mut out = Vec::new();
        for (&[i, j], p) in &self.comps {
            for (e, c) in p.terms() {
                out.push(((i, j, e.clone()), c.clone()));
            }
        }
        out
    }
}

/// The Killing equation, checked exactly on all index triples.
pub fn check_killing(k: &KillingTensor) -> bool {
    let n = k.dim();
    for t in sorted_tuples(n, 3) {
        let (i, j, l) = (t[0], t[1], t[2]);
        let sum = &(&k.component(j, l).partial(i) + &k.component(l, i).partial(j))
            + &k.component(i, j).partial(l);
        if !sum.is_zero() {
            return false;
        }
    }
    true
}

/// Canonical basis of the space of valence-2 Killing tensors in flat
/// `n`-space: symmetrized products of translation and rotation one-forms,
/// greedily filtered to an independent set in a fixed enumeration order.
/// The first `n (n+1) / 2` entries are the constant tensors `dx_a dx_b`.
pub fn killing_basis(dim: usize) -> Vec<KillingTensor> {
    // one-forms: components of dx_a, then x_a dx_b - x_b dx_a for a < b
    let mut forms: Vec<Vec<LaurentPoly>> = Vec::new();
    for a in 0..dim {
        let mut f = vec![LaurentPoly::zero(dim); dim];
        f[a] = LaurentPoly::one(dim);
        forms.push(f);
    }
    for a in 0..dim {
        for b in a + 1..dim {
            let mut f = vec![LaurentPoly::zero(dim); dim];
            f[b] = LaurentPoly::variable(dim, a);
            f[a] = -&LaurentPoly::variable(dim, b);
            forms.push(f);
        }
    }
    // product order: both translations first (the constant tensors), then
    // everything involving a rotation, each block in lexicographic (p, q)
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for p in 0..dim {
        for q in p..dim {
            pairs.push((p, q));
        }
    }
    for p in 0..forms.len() {
        for q in p.max(dim)..forms.len() {
            pairs.push((p, q));
        }
    }
    let mut columns: BTreeMap<(usize, usize, ExpVec), usize> = BTreeMap::new();
    let mut filter = IncrementalBasis::new();
    let mut basis = Vec::new();
    let half = Rational::new(1, 2);
    for (p, q) in pairs {
        let mut k = KillingTensor::zero(dim);
        for i in 0..dim {
            for j in i..dim {
                let mut v = &forms[p][i] * &forms[q][j];
                v = &v + &(&forms[p][j] * &forms[q][i]);
                k.set(i, j, v.scale(&half));
            }
        }
        let entries: Vec<(usize, Rational)> = k
            .rows()
            .into_iter()
            .map(|(key, c)| {
                let next = columns.len();
                (*columns.entry(key).or_insert(next), c)
            })
            .collect();
        if filter.try_add(entries) {
            basis.push(k);
        }
    }
    basis
}

/// Expected dimension of the flat valence-2 Killing space.
pub fn killing_space_dim(n: usize) -> usize {
    n * (n + 1) * (n + 1) * (n + 2) / 12
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompanionError {
    #[error("companion potential would need a logarithm in coordinate {coord}")]
    LogObstruction { coord: usize },
    #[error("one-form is not closed (tensor incompatible with the potential)")]
    NotClosed,
}

fn one_form(
    mixed: &[Vec<LaurentPoly>],
    grads: &[LaurentPoly],
    dim: usize,
) -> Vec<LaurentPoly> {
    (0..dim)
        .map(|i| {
            let mut acc = LaurentPoly::zero(dim);
            for (a, g) in grads.iter().enumerate() {
                if !g.is_zero() && !mixed[i][a].is_zero() {
                    acc = &acc + &(&mixed[i][a] * g);
                }
            }
            acc
        })
        .collect()
}

fn integrate_coord(p: &LaurentPoly, coord: usize) -> Result<LaurentPoly, CompanionError> {
    let n = p.arity();
    let mut out = LaurentPoly::zero(n);
    for (e, c) in p.terms() {
        let k = e.0[coord];
        if k == -1 {
            return Err(CompanionError::LogObstruction { coord });
        }
        let mut exps = e.clone();
        exps.0[coord] = k + 1;
        out.add_term(exps, c / &Rational::from_int((k + 1) as i64));
    }
    Ok(out)
}

/// Antiderivative of an exact one-form, normalized to drop the constant.
/// Rejects log obstructions (some `omega_i` carries an `x_i^-1` monomial) and
/// non-closed input (nonzero remainder after coordinate-wise integration).
pub fn integrate_one_form(omega: &[LaurentPoly]) -> Result<LaurentPoly, CompanionError> {
    let n = omega.len();
    let mut w = LaurentPoly::zero(n);
    let mut rem: Vec<LaurentPoly> = omega.to_vec();
    for i in 0..n {
        if rem[i].is_zero() {
            continue;
        }
        let piece = integrate_coord(&rem[i], i)?;
        for (j, r) in rem.iter_mut().enumerate() {
            *r = &*r - &piece.partial(j);
        }
        w = &w + &piece;
    }
    if rem.iter().any(|r| !r.is_zero()) {
        return Err(CompanionError::NotClosed);
    }
    Ok(w.without_constant_term())
}

/// Companion potential `W` with `d_i W = K_i{}^a d_a V`, normalized to have
/// no constant term.  Fails when the one-form is not closed (incompatible
/// tensor) or needs a logarithm.
pub fn integrate_companion(
    k: &KillingTensor,
    v: &LaurentPoly,
    metric: &FlatMetric,
) -> Result<LaurentPoly, CompanionError> {
    let n = metric.dim();
    assert_eq!(k.dim(), n, "tensor dimension mismatch");
    assert_eq!(v.arity(), n, "potential arity mismatch");
    let mixed = k.mixed(metric);
    let grads: Vec<LaurentPoly> = (0..n).map(|a| v.partial(a)).collect();
    integrate_one_form(&one_form(&mixed, &grads, n))
}

/// Coefficient matrix of the compatibility conditions: one column per
/// candidate tensor, one row per monomial of each curl component
/// `d_i omega_j - d_j omega_i` for each basis potential.  The kernel is the
/// compatible subspace.
pub fn bd_system(
    hf: &HesseFrobenius,
    family: &PotentialFamily,
    candidates: &[KillingTensor],
) -> SparseRowMat {
    let n = hf.dim();
    let mut rows: BTreeMap<(usize, usize, usize, ExpVec), Vec<(usize, Rational)>> =
        BTreeMap::new();
    for (col, k) in candidates.iter().enumerate() {
        let mixed = k.mixed(hf.metric());
        for (mu, v) in family.basis().iter().enumerate() {
            let grads: Vec<LaurentPoly> = (0..n).map(|a| v.partial(a)).collect();
            let omega = one_form(&mixed, &grads, n);
            for i in 0..n {
                for j in i + 1..n {
                    let curl = &omega[j].partial(i) - &omega[i].partial(j);
                    for (e, c) in curl.terms() {
                        rows.entry((mu, i, j, e.clone()))
                            .or_default()
                            .push((col, c.clone()));
                    }
                }
            }
        }
    }
    let mut system = SparseRowMat::new(candidates.len());
    for (_, entries) in rows {
        system.push_rational_row(entries);
    }
    system
}

/// The compatible Killing tensors of a system, with companion potentials for
/// every (tensor, basis potential) pair.
#[derive(Debug, Clone)]
pub struct CompatibleSystem {
    ambient_dim: usize,
    tensors: Vec<KillingTensor>,
    coords: Vec<Vec<Rational>>,
    companions: Vec<Vec<LaurentPoly>>,
}

impl CompatibleSystem {
    pub fn dim(&self) -> usize {
        self.tensors.len()
    }

    /// Dimension of the ambient Killing space the compatible span sits in.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn tensors(&self) -> &[KillingTensor] {
        &self.tensors
    }

    /// Coordinates of each tensor in the canonical Killing basis.
    pub fn coords(&self) -> &[Vec<Rational>] {
        &self.coords
    }

    /// `companions()[nu][mu]` integrates tensor `nu` against basis potential `mu`.
    pub fn companions(&self) -> &[Vec<LaurentPoly>] {
        &self.companions
    }

    /// Span membership over vectorized components; individual compatibility
    /// with the family is equivalent to membership here.
    pub fn contains(&self, k: &KillingTensor) -> bool {
        let mut columns: BTreeMap<(usize, usize, ExpVec), usize> = BTreeMap::new();
        let mut vectorize = |t: &KillingTensor| -> Vec<(usize, Rational)> {
            t.rows()
                .into_iter()
                .map(|(key, c)| {
                    let next = columns.len();
                    (*columns.entry(key).or_insert(next), c)
                })
                .collect()
        };
        let mut filter = IncrementalBasis::new();
        for t in &self.tensors {
            filter.try_add(vectorize(t));
        }
        !filter.try_add(vectorize(k))
    }
}

/// Solves the compatibility conditions over the full Killing basis and
/// integrates all companion potentials.
pub fn compatible_killing(
    hf: &HesseFrobenius,
    family: &PotentialFamily,
) -> Result<CompatibleSystem, CompanionError> {
    let basis = killing_basis(hf.dim());
    let system = bd_system(hf, family, &basis);
    let kernel = system.kernel();
    let mut tensors = Vec::with_capacity(kernel.len());
    let mut companions = Vec::with_capacity(kernel.len());
    for coords in &kernel {
        let mut k = KillingTensor::zero(hf.dim());
        for (c, b) in coords.iter().zip(&basis) {
            k.add_scaled(b, c);
        }
        let mut row = Vec::with_capacity(family.dim());
        for v in family.basis() {
            row.push(integrate_companion(&k, v, hf.metric())?);
        }
        tensors.push(k);
        companions.push(row);
    }
    Ok(CompatibleSystem { ambient_dim: basis.len(), tensors, coords: kernel, companions })
}

/// How the compatible space of a product system distributes over coordinate
/// blocks: `block_counts[f]` is the dimension of the subspace supported
/// entirely on block `f` (components and coefficients), `mixed` is the rest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InheritanceReport {
    pub block_counts: Vec<usize>,
    pub mixed: usize,
    pub total: usize,
}

/// Blocks are arbitrary disjoint coordinate sets (they need not be
/// contiguous: interleaved gluings occur in practice).
pub fn inheritance_report(product: &CompatibleSystem, blocks: &[Vec<usize>]) -> InheritanceReport {
    let total = product.dim();
    let mut block_counts = Vec::with_capacity(blocks.len());
    for block in blocks {
        let inside = |i: usize| block.contains(&i);
        // project each tensor onto the components/monomials *outside* the
        // block; the kernel of that projection is the block-supported subspace
        let mut columns: BTreeMap<(usize, usize, ExpVec), usize> = BTreeMap::new();
        let mut filter = IncrementalBasis::new();
        let mut off_rank = 0;
        for t in product.tensors() {
            let entries: Vec<(usize, Rational)> = t
                .rows()
                .into_iter()
                .filter(|((i, j, e), _)| {
                    let comps_outside = !inside(*i) || !inside(*j);
                    let coeff_outside =
                        e.0.iter().enumerate().any(|(c, &exp)| exp != 0 && !inside(c));
                    comps_outside || coeff_outside
                })
                .map(|(key, c)| {
                    let next = columns.len();
                    (*columns.entry(key).or_insert(next), c)
                })
                .collect();
            if filter.try_add(entries) {
                off_rank += 1;
            }
        }
        block_counts.push(total - off_rank);
    }
    let inherited: usize = block_counts.iter().sum();
    InheritanceReport { block_counts, mixed: total - inherited, total }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hesse::{from_frobenius_potential, glue, semisimple_structure};
    use crate::potential::{default_window, solve_potentials};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn x(arity: usize, i: usize) -> LaurentPoly {
        LaurentPoly::variable(arity, i)
    }

    fn mono(arity: usize, exps: &[i32], c: Rational) -> LaurentPoly {
        LaurentPoly::monomial(arity, ExpVec(exps.to_vec()), c)
    }

    fn nilpotent2d() -> HesseFrobenius {
        let phi = x(2, 0).pow(3).scale(&q(1, 6));
        from_frobenius_potential(&phi, &FlatMetric::paired(2)).unwrap()
    }

    #[test]
    fn killing_basis_dimensions_match_the_flat_count() {
        for n in 1..=4 {
            let basis = killing_basis(n);
            assert_eq!(basis.len(), killing_space_dim(n), "dimension {n}");
            assert!(basis.iter().all(check_killing));
        }
        assert_eq!(killing_space_dim(1), 1);
        assert_eq!(killing_space_dim(2), 6);
        assert_eq!(killing_space_dim(3), 20);
        assert_eq!(killing_space_dim(4), 50);
        assert_eq!(killing_space_dim(8), 540);
    }

    #[test]
    fn killing_basis_leads_with_constant_tensors() {
        let basis = killing_basis(3);
        for k in basis.iter().take(6) {
            for (_, p) in k.iter() {
                assert_eq!(p.max_abs_degree(), 0, "momentum products come first");
            }
        }
        // and the very first is dx1^2
        assert_eq!(basis[0].component(0, 0), LaurentPoly::one(3));
    }

    #[test]
    fn non_killing_tensor_is_rejected() {
        let mut k = KillingTensor::zero(2);
        k.set(0, 0, x(2, 1).pow(2));
        assert!(!check_killing(&k));
        // while the rotational square is accepted
        let mut r = KillingTensor::zero(2);
        r.set(0, 0, x(2, 1).pow(2));
        r.set(1, 1, x(2, 0).pow(2));
        r.set(0, 1, -&(&x(2, 0) * &x(2, 1)));
        assert!(check_killing(&r));
    }

    #[test]
    fn companion_for_translation_square() {
        let e3 = FlatMetric::euclidean(3);
        let mut k = KillingTensor::zero(3);
        k.set(0, 0, LaurentPoly::one(3));
        let radial = (0..3).fold(LaurentPoly::zero(3), |acc, j| &acc + &x(3, j).pow(2));
        let w = integrate_companion(&k, &radial, &e3).unwrap();
        assert_eq!(w, x(3, 0).pow(2));
    }

    #[test]
    fn companion_for_rotational_square_with_inverse_square_potential() {
        let e2 = FlatMetric::euclidean(2);
        let mut k = KillingTensor::zero(2);
        k.set(0, 0, x(2, 1).pow(2));
        k.set(1, 1, x(2, 0).pow(2));
        k.set(0, 1, -&(&x(2, 0) * &x(2, 1)));
        let v = mono(2, &[-2, 0], q(1, 1));
        let w = integrate_companion(&k, &v, &e2).unwrap();
        assert_eq!(w, mono(2, &[-2, 2], q(1, 1)));
    }

    #[test]
    fn companion_failures_are_classified() {
        let e2 = FlatMetric::euclidean(2);
        let mut k = KillingTensor::zero(2);
        k.set(0, 0, LaurentPoly::one(2));
        assert_eq!(
            integrate_companion(&k, &(&x(2, 0) * &x(2, 1)), &e2),
            Err(CompanionError::NotClosed)
        );

        let e1 = FlatMetric::euclidean(1);
        let mut k = KillingTensor::zero(1);
        k.set(0, 0, x(1, 0).pow(2));
        assert_eq!(
            integrate_companion(&k, &mono(1, &[-2], q(1, 1)), &e1),
            Err(CompanionError::LogObstruction { coord: 0 })
        );
    }

    #[test]
    fn nilpotent2d_compatible_space() {
        let hf = nilpotent2d();
        let family = solve_potentials(&hf, &default_window(&hf)).unwrap();
        assert_eq!(family.dim(), 4);
        let compat = compatible_killing(&hf, &family).unwrap();
        assert_eq!(compat.dim(), 3); // n(n+1)/2 for an abundant system
        assert_eq!(compat.ambient_dim(), 6);
        assert!(compat.tensors().iter().all(check_killing));
        assert!(compat.contains(&KillingTensor::from_metric(hf.metric())));
    }

    #[test]
    fn semisimple3_compatible_space_and_membership() {
        let hf = semisimple_structure(3, &[true; 3]).unwrap();
        let family = solve_potentials(&hf, &default_window(&hf)).unwrap();
        let compat = compatible_killing(&hf, &family).unwrap();
        assert_eq!(compat.dim(), 6);
        // dx1 dx2 is Killing but not compatible with the inverse-square terms
        let mut k = KillingTensor::zero(3);
        k.set(0, 1, LaurentPoly::constant(3, q(1, 2)));
        assert!(check_killing(&k));
        assert!(!compat.contains(&k));
        // every diagonal translation square is compatible
        let mut d = KillingTensor::zero(3);
        d.set(1, 1, LaurentPoly::one(3));
        assert!(compat.contains(&d));
    }

    #[test]
    fn companions_differentiate_back_to_the_one_form() {
        let hf = semisimple_structure(3, &[true; 3]).unwrap();
        let family = solve_potentials(&hf, &default_window(&hf)).unwrap();
        let compat = compatible_killing(&hf, &family).unwrap();
        for (k, row) in compat.tensors().iter().zip(compat.companions()) {
            let mixed_free = row.iter().all(|w| w.constant_term().is_zero());
            assert!(mixed_free, "companions are normalized");
            for (v, w) in family.basis().iter().zip(row) {
                // recompute omega and compare with dW
                let recomputed = integrate_companion(k, v, hf.metric()).unwrap();
                assert_eq!(&recomputed, w);
            }
        }
    }

    #[test]
    fn product_of_two_nilpotent_systems_inherits_three_plus_three() {
        let hf = glue(&nilpotent2d(), &nilpotent2d());
        let family = solve_potentials(&hf, &default_window(&hf)).unwrap();
        assert_eq!(family.dim(), 6);
        let compat = compatible_killing(&hf, &family).unwrap();
        assert_eq!(compat.dim(), 10);
        let report = inheritance_report(&compat, &[vec![0, 1], vec![2, 3]]);
        assert_eq!(report.block_counts, vec![3, 3]);
        assert_eq!(report.mixed, 4);
        assert_eq!(report.total, 10);
    }

    #[test]
    fn bd_system_kernel_matches_direct_compatibility() {
        let hf = nilpotent2d();
        let family = solve_potentials(&hf, &default_window(&hf)).unwrap();
        let basis = killing_basis(2);
        let system = bd_system(&hf, &family, &basis);
        let (rank, kernel) = system.rank_and_kernel();
        assert_eq!(rank + kernel.len(), basis.len());
        assert_eq!(kernel.len(), 3);
        // each kernel member really integrates against every basis potential
        for coords in &kernel {
            let mut k = KillingTensor::zero(2);
            for (c, b) in coords.iter().zip(&basis) {
                k.add_scaled(b, c);
            }
            for v in family.basis() {
                assert!(integrate_companion(&k, v, hf.metric()).is_ok());
            }
        }
    }
}
