//! JSON documents for structures, solved families, and run reports.
//!
//! Index labels in files are 1-based and sorted ascending; in-memory indices
//! are 0-based.  Rational values are serialized as explicit `"p/q"` strings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::laurent::{ExpVec, LaurentPoly};
use crate::algebra::rational::Rational;
use crate::geometry::FlatMetric;
use crate::hesse::{assemble_cubic, HesseFrobenius};
use crate::killing::CompatibleSystem;
use crate::pipeline::RunReport;
use crate::potential::PotentialFamily;
use crate::verify::{CandidateRef, Certificate};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid document: {0}")]
    Validation(String),
}

fn invalid(msg: impl Into<String>) -> IoError {
    IoError::Validation(msg.into())
}

/// One Laurent monomial: coefficient and exponent vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonomialDoc {
    pub c: Rational,
    pub e: Vec<i32>,
}

/// Cubic component at a (1-based, sorted) index triple.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubicEntryDoc {
    pub i: Vec<usize>,
    pub poly: Vec<MonomialDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureDoc {
    pub dim: usize,
    pub metric: Vec<Vec<Rational>>,
    pub cubic: Vec<CubicEntryDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub dim: usize,
    pub family_dim: usize,
    pub basis: Vec<Vec<MonomialDoc>>,
}

/// Killing-tensor component at a (1-based, sorted) index pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorEntryDoc {
    pub i: Vec<usize>,
    pub poly: Vec<MonomialDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorDoc {
    pub comps: Vec<TensorEntryDoc>,
    /// Companion potential per family basis member.
    pub companions: Vec<Vec<MonomialDoc>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompatibleDoc {
    pub dim: usize,
    pub family_dim: usize,
    pub tensors: Vec<TensorDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub position: Vec<Rational>,
    pub momentum: Vec<Rational>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub dim: usize,
    pub seed: u64,
    pub target_rank: usize,
    pub achieved_rank: usize,
    pub brackets_checked: usize,
    pub points_tried: usize,
    pub coefficients: Vec<Rational>,
    /// `"H"` for the Hamiltonian, `"K<k>"` (1-based) for a tensor integral.
    pub selected: Vec<String>,
    pub witness: Option<WitnessDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InheritanceDoc {
    pub block_counts: Vec<usize>,
    pub mixed: usize,
    pub total: usize,
}

/// Summary of a full pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    pub dim: usize,
    pub family_dim: usize,
    pub compatible_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inheritance: Option<InheritanceDoc>,
    pub certificate: CertificateDoc,
}

pub fn poly_to_doc(p: &LaurentPoly) -> Vec<MonomialDoc> {
    p.terms()
        .map(|(e, c)| MonomialDoc { c: c.clone(), e: e.0.clone() })
        .collect()
}

pub fn poly_from_doc(dim: usize, doc: &[MonomialDoc]) -> Result<LaurentPoly, IoError> {
    let mut p = LaurentPoly::zero(dim);
    for m in doc {
        if m.e.len() != dim {
            return Err(invalid(format!(
                "exponent vector {:?} does not have {} entries",
                m.e, dim
            )));
        }
        let mono = LaurentPoly::monomial(dim, ExpVec(m.e.clone()), m.c.clone());
        p = &p + &mono;
    }
    Ok(p)
}

pub fn structure_to_doc(hf: &HesseFrobenius) -> StructureDoc {
    let cubic = hf
        .cubic()
        .iter()
        .map(|(idx, poly)| CubicEntryDoc {
            i: idx.iter().map(|&a| a + 1).collect(),
            poly: poly_to_doc(poly),
        })
        .collect();
    StructureDoc {
        dim: hf.dim(),
        metric: hf.metric().matrix().rows_vec(),
        cubic,
    }
}

pub fn structure_from_doc(doc: &StructureDoc) -> Result<HesseFrobenius, IoError> {
    if doc.dim == 0 {
        return Err(invalid("dimension must be positive"));
    }
    if doc.metric.len() != doc.dim || doc.metric.iter().any(|r| r.len() != doc.dim) {
        return Err(invalid("metric must be a dim x dim matrix"));
    }
    let metric = FlatMetric::new(crate::algebra::linalg::RatMatrix::from_rows(
        doc.metric.clone(),
    ))
    .map_err(|e| invalid(e.to_string()))?;

    let mut entries = Vec::with_capacity(doc.cubic.len());
    for entry in &doc.cubic {
        if entry.i.len() != 3 {
            return Err(invalid(format!("index tuple {:?} is not a triple", entry.i)));
        }
        if entry.i.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid(format!("index triple {:?} is not sorted", entry.i)));
        }
        if entry.i.iter().any(|&a| a == 0 || a > doc.dim) {
            return Err(invalid(format!(
                "index triple {:?} out of range 1..={}",
                entry.i, doc.dim
            )));
        }
        let idx = [entry.i[0] - 1, entry.i[1] - 1, entry.i[2] - 1];
        entries.push((idx, poly_from_doc(doc.dim, &entry.poly)?));
    }
    let cubic = assemble_cubic(doc.dim, &entries)
        .map_err(|conflicts| invalid(format!("{} conflicting cubic entries", conflicts.len())))?;
    HesseFrobenius::new(metric, cubic).map_err(|e| invalid(e.to_string()))
}

pub fn structure_to_json(hf: &HesseFrobenius) -> String {
    serde_json::to_string_pretty(&structure_to_doc(hf)).expect("serializable")
}

pub fn structure_from_json(s: &str) -> Result<HesseFrobenius, IoError> {
    structure_from_doc(&serde_json::from_str(s)?)
}

pub fn family_to_doc(family: &PotentialFamily, dim: usize) -> FamilyDoc {
    FamilyDoc {
        dim,
        family_dim: family.dim(),
        basis: family.basis().iter().map(poly_to_doc).collect(),
    }
}

pub fn compatible_to_doc(compat: &CompatibleSystem, family_dim: usize) -> CompatibleDoc {
    let tensors = compat
        .tensors()
        .iter()
        .zip(compat.companions())
        .map(|(k, row)| TensorDoc {
            comps: k
                .iter()
                .map(|([a, b], poly)| TensorEntryDoc {
                    i: vec![a + 1, b + 1],
                    poly: poly_to_doc(poly),
                })
                .collect(),
            companions: row.iter().map(poly_to_doc).collect(),
        })
        .collect();
    CompatibleDoc { dim: compat.ambient_dim(), family_dim, tensors }
}

pub fn certificate_to_doc(cert: &Certificate) -> CertificateDoc {
    CertificateDoc {
        dim: cert.dim,
        seed: cert.seed,
        target_rank: cert.target_rank,
        achieved_rank: cert.achieved_rank,
        brackets_checked: cert.brackets_checked,
        points_tried: cert.points_tried,
        coefficients: cert.coefficients.clone(),
        selected: cert
            .selected
            .iter()
            .map(|c| match c {
                CandidateRef::Hamiltonian => "H".to_string(),
                CandidateRef::Tensor(k) => format!("K{}", k + 1),
            })
            .collect(),
        witness: cert.witness.as_ref().map(|w| WitnessDoc {
            position: w.position.clone(),
            momentum: w.momentum.clone(),
        }),
    }
}

pub fn report_to_doc(report: &RunReport, system: Option<&str>) -> ReportDoc {
    ReportDoc {
        system: system.map(str::to_string),
        dim: report.dim,
        family_dim: report.family.dim(),
        compatible_dim: report.compatible.dim(),
        inheritance: report.inheritance.as_ref().map(|inh| InheritanceDoc {
            block_counts: inh.block_counts.clone(),
            mixed: inh.mixed,
            total: inh.total,
        }),
        certificate: certificate_to_doc(&report.certificate),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn structure_round_trips_through_json() {
        for name in ["nilpotent2d", "sw3d", "nilpotent4d"] {
            let hf = catalog::build(name).unwrap();
            let back = structure_from_json(&structure_to_json(&hf)).unwrap();
            assert_eq!(back.dim(), hf.dim());
            assert_eq!(back.metric().matrix().rows_vec(), hf.metric().matrix().rows_vec());
            assert_eq!(back.cubic(), hf.cubic());
        }
    }

    #[test]
    fn rationals_are_written_as_explicit_fractions() {
        let hf = catalog::build("sw3d").unwrap();
        let json = structure_to_json(&hf);
        assert!(json.contains("\"1/1\""), "metric entries: {json}");
        assert!(json.contains("\"-1/1\""), "cubic coefficients: {json}");
        // labels are 1-based: every index lands in 1..=dim
        let doc: StructureDoc = serde_json::from_str(&json).unwrap();
        assert!(doc.cubic.iter().all(|e| e.i.iter().all(|&a| a >= 1 && a <= 3)));
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let hf = catalog::build("nilpotent2d").unwrap();
        let mut doc = structure_to_doc(&hf);
        doc.metric[0][1] = Rational::from_int(5); // breaks symmetry
        assert!(matches!(structure_from_doc(&doc), Err(IoError::Validation(_))));

        let mut doc = structure_to_doc(&hf);
        doc.cubic[0].i = vec![2, 1, 1]; // unsorted triple
        assert!(matches!(structure_from_doc(&doc), Err(IoError::Validation(_))));

        let mut doc = structure_to_doc(&hf);
        doc.cubic[0].i = vec![0, 1, 1]; // 0 is not a valid 1-based label
        assert!(matches!(structure_from_doc(&doc), Err(IoError::Validation(_))));

        let mut doc = structure_to_doc(&hf);
        doc.cubic[0].poly[0].e = vec![3]; // wrong arity
        assert!(matches!(structure_from_doc(&doc), Err(IoError::Validation(_))));

        assert!(matches!(structure_from_json("{"), Err(IoError::Json(_))));
    }

    #[test]
    fn report_document_carries_the_pipeline_summary() {
        let hf = catalog::build("nilpotent2d").unwrap();
        let report = crate::pipeline::run(
            &hf,
            &crate::pipeline::RunOptions { seed: 9, ..Default::default() },
        )
        .unwrap();
        let doc = report_to_doc(&report, Some("nilpotent2d"));
        let json = serde_json::to_string_pretty(&doc).unwrap();
        let back: ReportDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.system.as_deref(), Some("nilpotent2d"));
        assert_eq!(back.family_dim, 4);
        assert_eq!(back.compatible_dim, 3);
        assert_eq!(back.certificate.achieved_rank, 3);
        assert_eq!(back.certificate.selected.first().map(String::as_str), Some("H"));
    }
}
