//! Seeded random generators and reusable property suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use superint::algebra::laurent::{ExpVec, LaurentPoly};
use superint::algebra::linalg::{RatMatrix, SparseRowMat};
use superint::algebra::rational::Rational;
use superint::geometry::{hessian, FlatMetric};
use superint::killing::{integrate_one_form, CompanionError};
use superint::verify::{poisson_bracket, PhasePoly};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let mut num = 0i64;
    while num == 0 {
        num = rng.gen_range(-9..=9);
    }
    Rational::new(num, rng.gen_range(1..=9))
}

pub fn random_poly(rng: &mut ChaCha8Rng, arity: usize, terms: usize, lo: i32, hi: i32) -> LaurentPoly {
    let mut p = LaurentPoly::zero(arity);
    for _ in 0..terms {
        let e = ExpVec((0..arity).map(|_| rng.gen_range(lo..=hi)).collect());
        let mono = LaurentPoly::monomial(arity, e, random_rational(rng));
        p = &p + &mono;
    }
    p
}

pub fn random_phase(rng: &mut ChaCha8Rng, dim: usize, terms: usize) -> PhasePoly {
    let mut f = PhasePoly::zero(dim);
    for _ in 0..terms {
        let mut term = PhasePoly::from_position(random_poly(rng, dim, 2, -1, 2));
        for j in 0..dim {
            for _ in 0..rng.gen_range(0..2) {
                term = term.mul(&PhasePoly::momentum(dim, j));
            }
        }
        f = f.add(&term);
    }
    f
}

fn random_metric(rng: &mut ChaCha8Rng) -> FlatMetric {
    match rng.gen_range(0..4) {
        0 => FlatMetric::euclidean(rng.gen_range(1..=4)),
        1 => FlatMetric::paired(2 * rng.gen_range(1..=2)),
        2 => FlatMetric::block_diag(&FlatMetric::paired(2), &FlatMetric::euclidean(rng.gen_range(1..=2))),
        _ => FlatMetric::block_diag(&FlatMetric::euclidean(1), &FlatMetric::paired(2)),
    }
}

/// Commutative-ring laws for Laurent polynomials.
pub fn ring_axiom_suite(seed: u64, instances: usize) {
    let mut rng = rng(seed);
    for _ in 0..instances {
        let arity = rng.gen_range(1..=3);
        let a = random_poly(&mut rng, arity, 3, -2, 3);
        let b = random_poly(&mut rng, arity, 3, -2, 3);
        let c = random_poly(&mut rng, arity, 2, -2, 3);
        assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        assert_eq!(&a + &b, &b + &a);
        assert_eq!(&a * &b, &b * &a);
        assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        assert!((&a + &(-&a)).is_zero());
        assert_eq!(&a * &LaurentPoly::one(arity), a);
        let s = random_rational(&mut rng);
        assert_eq!((&a + &b).scale(&s), &a.scale(&s) + &b.scale(&s));
    }
}

/// Rank-nullity and kernel annihilation for the sparse eliminator, checked
/// against the dense matrix on the same data.
pub fn rank_nullity_suite(seed: u64, instances: usize) {
    let mut rng = rng(seed);
    for _ in 0..instances {
        let rows = rng.gen_range(1..=8);
        let cols = rng.gen_range(1..=8);
        let mut sparse = SparseRowMat::new(cols);
        let mut dense = RatMatrix::zeros(rows, cols);
        for r in 0..rows {
            let mut entries = Vec::new();
            for c in 0..cols {
                if rng.gen_bool(0.4) {
                    let v = random_rational(&mut rng);
                    dense.set(r, c, v.clone());
                    entries.push((c, v));
                }
            }
            sparse.push_rational_row(entries);
        }
        let (rank, kernel) = sparse.rank_and_kernel();
        assert_eq!(rank + kernel.len(), cols, "rank-nullity");
        assert_eq!(rank, dense.rank(), "sparse/dense rank agreement");
        for v in &kernel {
            let image = dense.mul_vec(v);
            assert!(image.iter().all(Rational::is_zero), "kernel vector not annihilated");
        }
    }
}

/// Antisymmetry, Jacobi, and Leibniz for the Poisson bracket.
pub fn bracket_suite(seed: u64, instances: usize) {
    let mut rng = rng(seed);
    for _ in 0..instances {
        let dim = rng.gen_range(1..=3);
        let f = random_phase(&mut rng, dim, 2);
        let g = random_phase(&mut rng, dim, 2);
        let h = random_phase(&mut rng, dim, 2);
        let fg = poisson_bracket(&f, &g);
        assert_eq!(fg.neg(), poisson_bracket(&g, &f), "antisymmetry");
        let jacobi = poisson_bracket(&fg, &h)
            .add(&poisson_bracket(&poisson_bracket(&g, &h), &f))
            .add(&poisson_bracket(&poisson_bracket(&h, &f), &g));
        assert!(jacobi.is_zero(), "jacobi identity");
        let leibniz = poisson_bracket(&f, &g.mul(&h))
            .sub(&poisson_bracket(&f, &g).mul(&h))
            .sub(&g.mul(&poisson_bracket(&f, &h)));
        assert!(leibniz.is_zero(), "leibniz rule");
    }
}

/// The metric trace of a Hessian is the Laplacian.
pub fn hessian_trace_suite(seed: u64, instances: usize) {
    let mut rng = rng(seed);
    for _ in 0..instances {
        let metric = random_metric(&mut rng);
        let v = random_poly(&mut rng, metric.dim(), 4, -2, 3);
        let traced = hessian(&v).metric_trace(&metric).component(&[]);
        assert_eq!(traced, metric.laplacian(&v), "hessian trace vs laplacian");
    }
}

/// Integrating an exact one-form recovers the potential; re-differentiating
/// recovers the form.  Obstructed inputs are classified, not mis-integrated.
pub fn companion_suite(seed: u64, instances: usize) {
    let mut rng = rng(seed);
    for _ in 0..instances {
        let dim = rng.gen_range(1..=3);
        let w = random_poly(&mut rng, dim, 4, -2, 3);
        let omega: Vec<LaurentPoly> = (0..dim).map(|j| w.partial(j)).collect();
        let back = integrate_one_form(&omega).expect("exact form integrates");
        assert_eq!(back, w.without_constant_term(), "potential recovered");
        for j in 0..dim {
            assert_eq!(back.partial(j), omega[j], "re-differentiation");
        }
    }
    // obstruction classification on fixed inputs
    let x = |i: usize| LaurentPoly::variable(2, i);
    let not_closed = [x(1), LaurentPoly::zero(2)];
    assert_eq!(integrate_one_form(&not_closed), Err(CompanionError::NotClosed));
    let log_pole = [
        LaurentPoly::monomial(2, ExpVec(vec![-1, 0]), Rational::from_int(1)),
        LaurentPoly::zero(2),
    ];
    assert_eq!(
        integrate_one_form(&log_pole),
        Err(CompanionError::LogObstruction { coord: 0 })
    );
}
