//! Multivariate Laurent polynomials over the rationals.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors under a graded
//! lexicographic order (total degree first, ties broken lexicographically),
//! so every polynomial has exactly one representation and iteration order is
//! deterministic.  Zero coefficients are never stored.  Exponents may be
//! negative; evaluation reports a pole instead of dividing by zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use super::rational::Rational;

/// Exponent vector of a Laurent monomial, one entry per coordinate.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExpVec(pub Vec<i32>);

impl ExpVec {
    pub fn zeros(arity: usize) -> Self {
        ExpVec(vec![0; arity])
    }

    pub fn unit(arity: usize, coord: usize) -> Self {
        let mut e = vec![0; arity];
        e[coord] = 1;
        ExpVec(e)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    /// Sum of absolute exponents; the size measure used by ansatz windows.
    pub fn abs_degree(&self) -> u32 {
        self.0.iter().map(|&e| e.unsigned_abs()).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for ExpVec {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len(), "exponent arity mismatch");
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExpVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("pole: coordinate {coord} is zero but appears with exponent {exponent}")]
    PoleAtPoint { coord: usize, exponent: i32 },
    #[error("point has {got} coordinates, polynomial has arity {expected}")]
    ArityMismatch { expected: usize, got: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("arity mismatch: {left} vs {right}")]
pub struct ArityMismatch {
    pub left: usize,
    pub right: usize,
}

/// Laurent polynomial in a fixed number of coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    arity: usize,
    terms: BTreeMap<ExpVec, Rational>,
}

impl LaurentPoly {
    pub fn zero(arity: usize) -> Self {
        LaurentPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Rational) -> Self {
        let mut p = LaurentPoly::zero(arity);
        if !c.is_zero() {
            p.terms.insert(ExpVec::zeros(arity), c);
        }
        p
    }

    pub fn one(arity: usize) -> Self {
        LaurentPoly::constant(arity, Rational::one())
    }

    /// The coordinate function `x_coord` (zero-based).
    pub fn variable(arity: usize, coord: usize) -> Self {
        assert!(coord < arity, "coordinate {coord} out of range for arity {arity}");
        LaurentPoly::monomial(arity, ExpVec::unit(arity, coord), Rational::one())
    }

    pub fn monomial(arity: usize, exps: ExpVec, coeff: Rational) -> Self {
        assert_eq!(exps.arity(), arity, "exponent arity mismatch");
        let mut p = LaurentPoly::zero(arity);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    pub fn from_terms<I>(arity: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExpVec, Rational)>,
    {
        let mut p = LaurentPoly::zero(arity);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical (graded-lex, ascending) order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &ExpVec) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&ExpVec::zeros(self.arity))
    }

    /// Drops the constant term; used to normalize integration constants.
    pub fn without_constant_term(&self) -> LaurentPoly {
        let mut p = self.clone();
        p.terms.remove(&ExpVec::zeros(self.arity));
        p
    }

    pub(crate) fn add_term(&mut self, exps: ExpVec, coeff: Rational) {
        assert_eq!(exps.arity(), self.arity, "exponent arity mismatch");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, rhs: &LaurentPoly) -> Result<LaurentPoly, ArityMismatch> {
        if self.arity != rhs.arity {
            return Err(ArityMismatch { left: self.arity, right: rhs.arity });
        }
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, rhs: &LaurentPoly) -> Result<LaurentPoly, ArityMismatch> {
        if self.arity != rhs.arity {
            return Err(ArityMismatch { left: self.arity, right: rhs.arity });
        }
        let mut out = LaurentPoly::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let exps = ExpVec(ea.0.iter().zip(&eb.0).map(|(a, b)| a + b).collect());
                out.add_term(exps, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(self.arity);
        }
        LaurentPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> LaurentPoly {
        let mut out = LaurentPoly::one(self.arity);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to coordinate `coord` (zero-based).
    pub fn partial(&self, coord: usize) -> LaurentPoly {
        assert!(coord < self.arity, "coordinate {coord} out of range");
        let mut out = LaurentPoly::zero(self.arity);
        for (e, c) in &self.terms {
            let k = e.0[coord];
            if k == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps.0[coord] = k - 1;
            out.add_term(exps, c * &Rational::from_int(k as i64));
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational, EvalError> {
        if point.len() != self.arity {
            return Err(EvalError::ArityMismatch { expected: self.arity, got: point.len() });
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (coord, (&exp, x)) in e.0.iter().zip(point).enumerate() {
                if exp == 0 {
                    continue;
                }
                if x.is_zero() {
                    if exp < 0 {
                        return Err(EvalError::PoleAtPoint { coord, exponent: exp });
                    }
                    term = Rational::zero();
                    break;
                }
                term *= &x.pow(exp);
            }
            acc += &term;
        }
        Ok(acc)
    }

    /// Substitutes `x_coord -> x_coord + shift`.  Only defined when `coord`
    /// never appears with a negative exponent (the binomial expansion would
    /// not be a Laurent polynomial otherwise).
    pub fn translate(&self, coord: usize, shift: &Rational) -> LaurentPoly {
        assert!(coord < self.arity, "coordinate {coord} out of range");
        let mut out = LaurentPoly::zero(self.arity);
        for (e, c) in &self.terms {
            let k = e.0[coord];
            assert!(k >= 0, "translate in coordinate {coord} with negative exponent {k}");
            // (x + s)^k expanded term by term
            let mut binom = Rational::one();
            for j in 0..=k {
                if j > 0 {
                    binom *= &Rational::new((k - j + 1) as i64, j as i64);
                }
                let mut exps = e.clone();
                exps.0[coord] = j;
                out.add_term(exps, c * &binom * shift.pow(k - j));
            }
        }
        out
    }

    /// Reinterprets the polynomial in a larger coordinate set: old coordinate
    /// `i` becomes `offset + i`, all other exponents zero.
    pub fn embed(&self, arity: usize, offset: usize) -> LaurentPoly {
        assert!(offset + self.arity <= arity, "embedding does not fit");
        let mut out = LaurentPoly::zero(arity);
        for (e, c) in &self.terms {
            let mut exps = vec![0; arity];
            exps[offset..offset + self.arity].copy_from_slice(&e.0);
            out.add_term(ExpVec(exps), c.clone());
        }
        out
    }

    /// Smallest exponent of `coord` over all terms (0 for an absent coordinate).
    pub fn min_exponent(&self, coord: usize) -> i32 {
        self.terms.keys().map(|e| e.0[coord]).min().unwrap_or(0).min(0)
    }

    pub fn max_abs_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.abs_degree()).max().unwrap_or(0)
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("arity mismatch in +")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(&-rhs).expect("arity mismatch in -")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("arity mismatch in *")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &exp) in e.0.iter().enumerate() {
                match exp {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    _ => factors.push(format!("x{}^{}", i + 1, exp)),
                }
            }
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly[{}]({})", self.arity, self)
    }
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

    #[test]
    fn graded_lex_order_is_total_degree_then_lex() {
        let a = ExpVec(vec![0, 0]);
        let b = ExpVec(vec![-1, 0]);
        let c = ExpVec(vec![0, 2]);
        let d = ExpVec(vec![1, 1]);
        let e = ExpVec(vec![2, 0]);
        assert!(b < a); // total degree -1 before 0
        assert!(a < c);
        assert!(c < d && d < e); // same degree, lex ascending
    }

    #[test]
    fn canonical_form_merges_and_drops_zeros() {
        let p = LaurentPoly::from_terms(
            2,
            vec![
                (ExpVec(vec![1, 0]), q(1, 2)),
                (ExpVec(vec![1, 0]), q(1, 2)),
                (ExpVec(vec![0, 1]), q(3, 1)),
                (ExpVec(vec![0, 1]), q(-3, 1)),
            ],
        );
        assert_eq!(p.num_terms(), 1);
        assert_eq!(p.coeff(&ExpVec(vec![1, 0])), Rational::one());
        assert!(p.coeff(&ExpVec(vec![0, 1])).is_zero());
    }

    #[test]
    fn product_of_laurent_monomials() {
        // (x1^-2 + x2) * x1^2 = 1 + x1^2 x2
        let p = &LaurentPoly::monomial(2, ExpVec(vec![-2, 0]), q(1, 1)) + &x(2, 1);
        let r = &p * &x(2, 0).pow(2);
        assert_eq!(r.constant_term(), Rational::one());
        assert_eq!(r.coeff(&ExpVec(vec![2, 1])), Rational::one());
        assert_eq!(r.num_terms(), 2);
    }

    #[test]
    fn partial_derivative_of_mixed_terms() {
        // d/dx4 of (x2^3 + 2 x2 x4)/2 = x2
        let p = &x(4, 1).pow(3).scale(&q(1, 2)) + &(&x(4, 1) * &x(4, 3));
        let d = p.partial(3);
        assert_eq!(d, x(4, 1));
    }

    #[test]
    fn partial_derivative_of_negative_powers() {
        // d/dx1 x1^-2 = -2 x1^-3
        let p = LaurentPoly::monomial(1, ExpVec(vec![-2]), q(1, 1));
        let d = p.partial(0);
        assert_eq!(d, LaurentPoly::monomial(1, ExpVec(vec![-3]), q(-2, 1)));
        // exponent -1 differentiates to -x^-2, never to a log
        let inv = LaurentPoly::monomial(1, ExpVec(vec![-1]), q(1, 1));
        assert_eq!(inv.partial(0), LaurentPoly::monomial(1, ExpVec(vec![-2]), q(-1, 1)));
    }

    #[test]
    fn evaluation_and_poles() {
        let p = &LaurentPoly::monomial(2, ExpVec(vec![-2, 0]), q(1, 1)) + &x(2, 1);
        assert_eq!(p.evaluate(&[q(1, 1), q(3, 1)]).unwrap(), q(4, 1));
        assert_eq!(p.evaluate(&[q(2, 1), q(0, 1)]).unwrap(), q(1, 4));
        assert_eq!(
            p.evaluate(&[q(0, 1), q(3, 1)]),
            Err(EvalError::PoleAtPoint { coord: 0, exponent: -2 })
        );
        // positive powers at zero are fine
        assert_eq!(x(2, 0).evaluate(&[q(0, 1), q(5, 1)]).unwrap(), q(0, 1));
        assert!(matches!(
            p.evaluate(&[q(1, 1)]),
            Err(EvalError::ArityMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn arity_mismatch_is_detected() {
        let p = x(2, 0);
        let r = x(3, 0);
        assert!(p.checked_add(&r).is_err());
        assert!(p.checked_mul(&r).is_err());
    }

    #[test]
    fn translation_is_a_ring_morphism_on_samples() {
        // p(x1, x2) = x1^2 x2; shift x1 by 3: (x1+3)^2 x2
        let p = &x(2, 0).pow(2) * &x(2, 1);
        let t = p.translate(0, &q(3, 1));
        let expected = &(&x(2, 0) + &LaurentPoly::constant(2, q(3, 1))).pow(2) * &x(2, 1);
        assert_eq!(t, expected);
        // evaluation agrees with evaluating the original at the shifted point
        let pt = [q(2, 5), q(-7, 3)];
        let shifted = [&pt[0] + &q(3, 1), pt[1].clone()];
        assert_eq!(t.evaluate(&pt).unwrap(), p.evaluate(&shifted).unwrap());
    }

    #[test]
    fn display_is_readable() {
        let p = &(&x(2, 0).pow(2).scale(&q(3, 2)) - &x(2, 1)) + &LaurentPoly::constant(2, q(-1, 1));
        assert_eq!(p.to_string(), "-1 - x2 + 3/2*x1^2");
        assert_eq!(LaurentPoly::zero(2).to_string(), "0");
        let inv = LaurentPoly::monomial(2, ExpVec(vec![-2, 0]), q(-1, 2));
        assert_eq!(inv.to_string(), "-1/2*x1^-2");
    }

    #[test]
    fn min_exponent_tracks_poles() {
        let p = &LaurentPoly::monomial(2, ExpVec(vec![-2, 1]), q(1, 1)) + &x(2, 1);
        assert_eq!(p.min_exponent(0), -2);
        assert_eq!(p.min_exponent(1), 0); // clamped at 0: only used for pole windows
    }
}
