//! Named example structures and their expected invariants.
//!
//! Fixed names build specific low-dimensional systems; the parametric form
//! `semisimple:<n>:<mask>` builds a diagonal structure in dimension `n` whose
//! mask selects which coordinates carry a nonzero eigenfunction (`1`) versus a
//! flat direction (`0`).  Example: `semisimple:4:1110`.

use thiserror::Error;

use crate::algebra::laurent::LaurentPoly;
use crate::algebra::rational::Rational;
use crate::geometry::FlatMetric;
use crate::hesse::{from_frobenius_potential, glue, semisimple_structure, HesseFrobenius};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown system `{0}`")]
    Unknown(String),
    #[error("bad parameter in `{name}`: {reason}")]
    BadParameter { name: String, reason: String },
}

/// Fixed catalog names, in presentation order.
pub fn names() -> &'static [&'static str] {
    &["oscillator1d", "nilpotent2d", "sw3d", "nilpotent4d", "glued8d"]
}

/// Expected `(family dimension, compatible dimension)` for a catalog name,
/// including the parametric family.  Abundant systems have `(n+2, n(n+1)/2)`;
/// the 1D oscillator is degenerate (every windowed potential solves the
/// potential equation there).
pub fn expected_counts(name: &str) -> Option<(usize, usize)> {
    match name {
        "oscillator1d" => Some((4, 1)),
        "nilpotent2d" => Some((4, 3)),
        "sw3d" => Some((5, 6)),
        "nilpotent4d" => Some((6, 10)),
        "glued8d" => Some((10, 36)),
        _ => {
            let (n, _) = parse_semisimple(name).ok()?;
            Some((n + 2, n * (n + 1) / 2))
        }
    }
}

/// Coordinate blocks of the constituent factors, for product systems.
pub fn factor_blocks(name: &str) -> Option<Vec<Vec<usize>>> {
    match name {
        "nilpotent4d" => Some(vec![vec![0, 2], vec![1, 3]]),
        "glued8d" => Some(vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]),
        _ => None,
    }
}

fn cubic_potential(coeffs: &[usize], dim: usize) -> LaurentPoly {
    let sixth = Rational::new(1, 6);
    let mut phi = LaurentPoly::zero(dim);
    for &j in coeffs {
        phi = &phi + &LaurentPoly::variable(dim, j).pow(3).scale(&sixth);
    }
    phi
}

fn parse_semisimple(name: &str) -> Result<(usize, Vec<bool>), CatalogError> {
    let bad = |reason: &str| CatalogError::BadParameter {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let rest = name.strip_prefix("semisimple:").ok_or_else(|| {
        CatalogError::Unknown(name.to_string())
    })?;
    let (n_str, mask_str) = rest
        .split_once(':')
        .ok_or_else(|| bad("expected semisimple:<n>:<mask>"))?;
    let n: usize = n_str.parse().map_err(|_| bad("dimension is not a number"))?;
    if mask_str.len() != n {
        return Err(bad("mask length must equal the dimension"));
    }
    let mask: Vec<bool> = mask_str
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(bad("mask characters must be 0 or 1")),
        })
        .collect::<Result<_, _>>()?;
    Ok((n, mask))
}

/// Builds a structure by catalog name.
pub fn build(name: &str) -> Result<HesseFrobenius, CatalogError> {
    match name {
        "oscillator1d" => Ok(from_frobenius_potential(
            &LaurentPoly::zero(1),
            &FlatMetric::euclidean(1),
        )
        .expect("flat line")),
        "nilpotent2d" => Ok(from_frobenius_potential(
            &cubic_potential(&[0], 2),
            &FlatMetric::paired(2),
        )
        .expect("nilpotent plane")),
        "nilpotent4d" => Ok(from_frobenius_potential(
            &cubic_potential(&[0, 1], 4),
            &FlatMetric::paired(4),
        )
        .expect("nilpotent 4-space")),
        "sw3d" => Ok(semisimple_structure(3, &[true; 3]).expect("diagonal 3d")),
        "glued8d" => {
            let tail = glue(&build("sw3d")?, &build("oscillator1d")?);
            Ok(glue(&build("nilpotent4d")?, &tail))
        }
        _ => {
            let (n, mask) = parse_semisimple(name)?;
            semisimple_structure(n, &mask).map_err(|e| CatalogError::BadParameter {
                name: name.to_string(),
                reason: e.to_string(),
            })
        }
    }
}
