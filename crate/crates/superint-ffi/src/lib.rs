//! C ABI for the workbench.
//!
//! The surface is deliberately small: structures travel as opaque handles,
//! reports travel as JSON strings, and every call returns a status code.
//! Strings returned through out-parameters are heap-allocated and must be
//! released with `superint_string_free`; handles with
//! `superint_structure_free`.  Passing null where a value is expected yields
//! `NullArgument`, never undefined behavior.

use std::ffi::{c_char, CStr, CString};

use superint::catalog::{self, CatalogError};
use superint::hesse::HesseFrobenius;
use superint::io;
use superint::pipeline::{self, PipelineError, RunOptions};

/// Opaque handle to a validated flat-metric structure.
pub struct SuperintStructure {
    inner: HesseFrobenius,
    /// Catalog name when the handle came from the catalog; drives default
    /// inheritance blocks in reports.
    name: Option<String>,
}

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperintStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The catalog name is unknown or carries a bad parameter.
    UnknownSystem = 3,
    /// A JSON document failed to parse or validate.
    ParseError = 4,
    /// The structure violates an axiom (symmetry, associativity, differential).
    AxiomFailure = 5,
    /// A downstream pipeline stage failed (solver, companion, certificate).
    PipelineFailure = 6,
}

fn read_str<'a>(s: *const c_char) -> Result<&'a str, SuperintStatus> {
    if s.is_null() {
        return Err(SuperintStatus::NullArgument);
    }
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| SuperintStatus::InvalidUtf8)
}

fn give_string(text: String, out: *mut *mut c_char) -> SuperintStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(_) => return SuperintStatus::ParseError,
    };
    unsafe { *out = c.into_raw() };
    SuperintStatus::Ok
}

fn give_structure(
    inner: HesseFrobenius,
    name: Option<String>,
    out: *mut *mut SuperintStructure,
) -> SuperintStatus {
    let handle = Box::new(SuperintStructure { inner, name });
    unsafe { *out = Box::into_raw(handle) };
    SuperintStatus::Ok
}

/// Version of the underlying crate as a static NUL-terminated string.
/// The pointer is valid for the lifetime of the program; do not free it.
#[no_mangle]
pub extern "C" fn superint_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a structure from a catalog name such as `nilpotent4d`, `glued8d`,
/// or `semisimple:4:1110`.
#[no_mangle]
pub extern "C" fn superint_structure_catalog(
    name: *const c_char,
    out: *mut *mut SuperintStructure,
) -> SuperintStatus {
    if out.is_null() {
        return SuperintStatus::NullArgument;
    }
    let name = match read_str(name) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match catalog::build(name) {
        Ok(hf) => give_structure(hf, Some(name.to_string()), out),
        Err(CatalogError::Unknown(_)) | Err(CatalogError::BadParameter { .. }) => {
            SuperintStatus::UnknownSystem
        }
    }
}

/// Parses a structure document (the same JSON the CLI reads and writes).
#[no_mangle]
pub extern "C" fn superint_structure_parse(
    json: *const c_char,
    out: *mut *mut SuperintStructure,
) -> SuperintStatus {
    if out.is_null() {
        return SuperintStatus::NullArgument;
    }
    let text = match read_str(json) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match io::structure_from_json(text) {
        Ok(hf) => give_structure(hf, None, out),
        Err(_) => SuperintStatus::ParseError,
    }
}

/// Dimension of the underlying space; 0 for a null handle.
#[no_mangle]
pub extern "C" fn superint_structure_dim(s: *const SuperintStructure) -> usize {
    match unsafe { s.as_ref() } {
        Some(s) => s.inner.dim(),
        None => 0,
    }
}

/// Runs the exact axiom checks on the handle.
#[no_mangle]
pub extern "C" fn superint_structure_check(s: *const SuperintStructure) -> SuperintStatus {
    match unsafe { s.as_ref() } {
        Some(s) if s.inner.check_axioms().passed() => SuperintStatus::Ok,
        Some(_) => SuperintStatus::AxiomFailure,
        None => SuperintStatus::NullArgument,
    }
}

/// Direct-sum product of two structures, as a fresh handle.
#[no_mangle]
pub extern "C" fn superint_structure_glue(
    a: *const SuperintStructure,
    b: *const SuperintStructure,
    out: *mut *mut SuperintStructure,
) -> SuperintStatus {
    if out.is_null() {
        return SuperintStatus::NullArgument;
    }
    let (a, b) = match (unsafe { a.as_ref() }, unsafe { b.as_ref() }) {
        (Some(a), Some(b)) => (a, b),
        _ => return SuperintStatus::NullArgument,
    };
    give_structure(superint::hesse::glue(&a.inner, &b.inner), None, out)
}

/// Serializes the structure document; release the string with
/// `superint_string_free`.
#[no_mangle]
pub extern "C" fn superint_structure_to_json(
    s: *const SuperintStructure,
    out: *mut *mut c_char,
) -> SuperintStatus {
    if out.is_null() {
        return SuperintStatus::NullArgument;
    }
    match unsafe { s.as_ref() } {
        Some(s) => give_string(io::structure_to_json(&s.inner), out),
        None => SuperintStatus::NullArgument,
    }
}

/// Runs the full pipeline (axioms, potential family, compatible tensors,
/// independence certificate) and returns the report document as JSON.
/// Catalog handles for product systems include inheritance accounting.
#[no_mangle]
pub extern "C" fn superint_run_json(
    s: *const SuperintStructure,
    seed: u64,
    out: *mut *mut c_char,
) -> SuperintStatus {
    if out.is_null() {
        return SuperintStatus::NullArgument;
    }
    let s = match unsafe { s.as_ref() } {
        Some(s) => s,
        None => return SuperintStatus::NullArgument,
    };
    let opts = RunOptions {
        window: None,
        blocks: s.name.as_deref().and_then(catalog::factor_blocks),
        seed,
    };
    match pipeline::run(&s.inner, &opts) {
        Ok(report) => {
            let doc = io::report_to_doc(&report, s.name.as_deref());
            give_string(serde_json::to_string_pretty(&doc).expect("serializable"), out)
        }
        Err(PipelineError::Axioms(_)) => SuperintStatus::AxiomFailure,
        Err(_) => SuperintStatus::PipelineFailure,
    }
}

/// Releases a string returned by this library.  Null is ignored.
#[no_mangle]
pub extern "C" fn superint_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Releases a structure handle.  Null is ignored.
#[no_mangle]
pub extern "C" fn superint_structure_free(s: *mut SuperintStructure) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}
