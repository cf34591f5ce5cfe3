//! End-to-end driver: axioms, potential family, compatible tensors,
//! optional inheritance bookkeeping, independence certificate.

use thiserror::Error;

use crate::hesse::{AxiomReport, HesseFrobenius};
use crate::killing::{
    compatible_killing, inheritance_report, CompanionError, CompatibleSystem, InheritanceReport,
};
use crate::potential::{default_window, solve_potentials, ExponentWindow, PotentialFamily, SolveError};
use crate::verify::{certify, Certificate, CertifyError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("structure fails the axioms: {0}")]
    Axioms(AxiomReport),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Companion(#[from] CompanionError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Ansatz window; derived from the structure when absent.
    pub window: Option<ExponentWindow>,
    /// Coordinate blocks for inheritance accounting (product systems).
    pub blocks: Option<Vec<Vec<usize>>>,
    pub seed: u64,
}

#[derive(Debug)]
pub struct RunReport {
    pub dim: usize,
    pub window: ExponentWindow,
    pub family: PotentialFamily,
    pub compatible: CompatibleSystem,
    pub inheritance: Option<InheritanceReport>,
    pub certificate: Certificate,
}

pub fn run(hf: &HesseFrobenius, opts: &RunOptions) -> Result<RunReport, PipelineError> {
    let axioms = hf.check_axioms();
    if !axioms.passed() {
        return Err(PipelineError::Axioms(axioms));
    }
    let window = opts.window.clone().unwrap_or_else(|| default_window(hf));
    let family = solve_potentials(hf, &window)?;
    let compatible = compatible_killing(hf, &family)?;
    let inheritance = opts
        .blocks
        .as_ref()
        .map(|blocks| inheritance_report(&compatible, blocks));
    let certificate = certify(hf, &family, &compatible, opts.seed)?;
    Ok(RunReport { dim: hf.dim(), window, family, compatible, inheritance, certificate })
}
