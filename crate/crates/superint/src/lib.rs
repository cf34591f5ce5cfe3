//! Exact-arithmetic workbench for second-order superintegrable systems.
//!
//! The crate builds flat-space Hamiltonians `H = g^{ij} p_i p_j + V` whose
//! potentials come from a Hesse-Frobenius structure (a flat metric together
//! with a cubic structure tensor satisfying an associativity and a
//! differential condition).  Everything downstream is linear algebra over the
//! rationals: solving the second-order PDE system for potentials, intersecting
//! with the space of constant-curvature Killing tensors, integrating companion
//! potentials, and certifying functional independence of the resulting
//! integrals of motion.
//!
//! No floating point is used anywhere; all coefficients are
//! arbitrary-precision rationals and every reported verdict is exact.

pub mod algebra;
pub mod catalog;
pub mod geometry;
pub mod hesse;
pub mod io;
pub mod killing;
pub mod pipeline;
pub mod potential;
pub mod verify;

pub use algebra::laurent::{ExpVec, LaurentPoly};
pub use algebra::linalg::{RatMatrix, SparseRowMat};
pub use algebra::rational::Rational;
pub use geometry::{FlatMetric, SemiSymTensor, SymTensorField};
pub use hesse::{glue, semisimple_structure, AxiomReport, HesseFrobenius};
pub use killing::{compatible_killing, inheritance_report, CompatibleSystem, KillingTensor};
pub use pipeline::{run, RunOptions, RunReport};
pub use potential::{default_window, solve_potentials, ExponentWindow, PotentialFamily};
pub use verify::{build_hamiltonian, build_integral, certify, poisson_bracket, Certificate, PhasePoly};

