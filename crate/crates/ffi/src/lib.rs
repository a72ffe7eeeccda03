//! C interface to ssvpkit.
//!
//! Objects cross the boundary as opaque handles owned by the caller and released with the
//! matching `*_free` function. Every fallible call returns an [`SsvpStatus`]; on failure
//! [`ssvp_last_error`] describes the error until the next call on the same thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ssvpkit::flow::{bifurcate, superpattern_realize, SolverConfig};
use ssvpkit::numerics::singular_values;
use ssvpkit::pattern::{pattern_of_default, term_rank};
use ssvpkit::realize::{realize_c6, realize_path};
use ssvpkit::verify::{check_ssvp, check_ssvp_wrt, CheckMode};
use ssvpkit::{DenseMatrix, Error, SigmaList};

/// Dense real matrix.
pub struct SsvpMatrix(DenseMatrix);

/// Zero-nonzero pattern.
pub struct SsvpPattern(ssvpkit::pattern::Pattern);

/// Outcome of an SSVP check.
pub struct SsvpCertificate(ssvpkit::verify::SsvpCertificate);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SsvpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    DegenerateSpectrum = 4,
    NumericalBreakdown = 5,
    AmbiguousPattern = 6,
    NotASuperpattern = 7,
    BorderlineRank = 8,
    Infeasible = 9,
    SsvpRequired = 10,
    SsvpWrtRequired = 11,
    NoConvergence = 12,
    TargetTooFar = 13,
    Parse = 14,
    Io = 15,
    BufferTooSmall = 16,
    Panic = 17,
}

impl From<&Error> for SsvpStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInput(_) => SsvpStatus::InvalidInput,
            Error::DimensionMismatch(_) => SsvpStatus::DimensionMismatch,
            Error::DegenerateSpectrum => SsvpStatus::DegenerateSpectrum,
            Error::NumericalBreakdown(_) => SsvpStatus::NumericalBreakdown,
            Error::AmbiguousPattern { .. } => SsvpStatus::AmbiguousPattern,
            Error::NotASuperpattern => SsvpStatus::NotASuperpattern,
            Error::BorderlineRank { .. } => SsvpStatus::BorderlineRank,
            Error::Infeasible(_) => SsvpStatus::Infeasible,
            Error::SsvpRequired => SsvpStatus::SsvpRequired,
            Error::SsvpWrtRequired => SsvpStatus::SsvpWrtRequired,
            Error::NoConvergence { .. } => SsvpStatus::NoConvergence,
            Error::TargetTooFar { .. } => SsvpStatus::TargetTooFar,
            Error::Parse { .. } => SsvpStatus::Parse,
            Error::Io(_) => SsvpStatus::Io,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Status(SsvpStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(SsvpStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, translating errors and panics into a status and the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SsvpStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SsvpStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            SsvpStatus::from(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_last_error(&msg);
            s
        }
        Err(_) => {
            set_last_error("internal panic");
            SsvpStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn config(json: *const c_char) -> Result<SolverConfig, Failure> {
    if json.is_null() {
        return Ok(SolverConfig::default());
    }
    let text = CStr::from_ptr(json)
        .to_str()
        .map_err(|_| Failure::Status(SsvpStatus::InvalidInput, "config is not UTF-8".into()))?;
    let cfg: SolverConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

unsafe fn sigmas(p: *const f64, len: usize) -> Result<SigmaList, Failure> {
    let v = slice(p, len, "sigmas")?;
    Ok(SigmaList::from_unsorted(v.to_vec())?.0)
}

/// Message for the most recent failure on this thread; empty after a success. The
/// pointer stays valid until the next ssvpkit call on this thread.
#[no_mangle]
pub extern "C" fn ssvp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ssvp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies `rows * cols` row-major entries into a new matrix.
#[no_mangle]
pub unsafe extern "C" fn ssvp_matrix_new(
    rows: usize,
    cols: usize,
    data: *const f64,
    out: *mut *mut SsvpMatrix,
) -> SsvpStatus {
    guard(|| {
        let n = rows.checked_mul(cols).ok_or_else(|| Error::InvalidInput("dimensions overflow".into()))?;
        let d = slice(data, n, "data")?;
        put(out, SsvpMatrix(DenseMatrix::new(rows, cols, d.to_vec())?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ssvp_matrix_free(m: *mut SsvpMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Writes the row and column counts.
#[no_mangle]
pub unsafe extern "C" fn ssvp_matrix_shape(m: *const SsvpMatrix, rows: *mut usize, cols: *mut usize) -> SsvpStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        if rows.is_null() || cols.is_null() {
            return Err(null("shape output"));
        }
        *rows = m.0.rows();
        *cols = m.0.cols();
        Ok(())
    })
}

/// Copies the row-major entries into `out`, which must hold `rows * cols` values.
#[no_mangle]
pub unsafe extern "C" fn ssvp_matrix_data(m: *const SsvpMatrix, out: *mut f64, len: usize) -> SsvpStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        let data = m.0.data();
        if len < data.len() {
            return Err(Failure::Status(SsvpStatus::BufferTooSmall, format!("need {} entries", data.len())));
        }
        if !data.is_empty() {
            if out.is_null() {
                return Err(null("output buffer"));
            }
            ptr::copy_nonoverlapping(data.as_ptr(), out, data.len());
        }
        Ok(())
    })
}

/// Writes the `min(rows, cols)` singular values, non-increasing, into `out`.
#[no_mangle]
pub unsafe extern "C" fn ssvp_singular_values(m: *const SsvpMatrix, out: *mut f64, len: usize) -> SsvpStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        let s = singular_values(&m.0)?;
        if len < s.len() {
            return Err(Failure::Status(SsvpStatus::BufferTooSmall, format!("need {} entries", s.len())));
        }
        if !s.is_empty() {
            if out.is_null() {
                return Err(null("output buffer"));
            }
            ptr::copy_nonoverlapping(s.values().as_ptr(), out, s.len());
        }
        Ok(())
    })
}

/// Builds a pattern from `rows * cols` row-major cells; any nonzero byte is a one.
#[no_mangle]
pub unsafe extern "C" fn ssvp_pattern_new(
    rows: usize,
    cols: usize,
    cells: *const u8,
    out: *mut *mut SsvpPattern,
) -> SsvpStatus {
    guard(|| {
        let n = rows.checked_mul(cols).ok_or_else(|| Error::InvalidInput("dimensions overflow".into()))?;
        let c = slice(cells, n, "cells")?;
        let p = ssvpkit::pattern::Pattern::new(rows, cols, c.iter().map(|&x| x != 0).collect())?;
        put(out, SsvpPattern(p))
    })
}

/// The pattern of a matrix under the default zero tolerance.
#[no_mangle]
pub unsafe extern "C" fn ssvp_pattern_of(m: *const SsvpMatrix, out: *mut *mut SsvpPattern) -> SsvpStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        put(out, SsvpPattern(pattern_of_default(&m.0)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ssvp_pattern_free(p: *mut SsvpPattern) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ssvp_term_rank(p: *const SsvpPattern, out: *mut usize) -> SsvpStatus {
    guard(|| {
        let p = handle(p, "pattern")?;
        if out.is_null() {
            return Err(null("output"));
        }
        *out = term_rank(&p.0).0;
        Ok(())
    })
}

/// Checks the SSVP, relative to `wrt` when it is non-null. `exact` selects rational
/// elimination for rational input.
#[no_mangle]
pub unsafe extern "C" fn ssvp_check(
    m: *const SsvpMatrix,
    wrt: *const SsvpPattern,
    exact: bool,
    out: *mut *mut SsvpCertificate,
) -> SsvpStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        let mode = if exact { CheckMode::ExactWhenRational } else { CheckMode::Numeric };
        let cert = match wrt.as_ref() {
            Some(s) => check_ssvp_wrt(&m.0, &s.0, mode)?,
            None => check_ssvp(&m.0, mode)?,
        };
        put(out, SsvpCertificate(cert))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ssvp_certificate_has_ssvp(c: *const SsvpCertificate) -> bool {
    c.as_ref().is_some_and(|c| c.0.has_ssvp())
}

/// The certificate as a JSON string, released with [`ssvp_string_free`]; null on failure.
#[no_mangle]
pub unsafe extern "C" fn ssvp_certificate_json(c: *const SsvpCertificate) -> *mut c_char {
    let mut result = ptr::null_mut();
    guard(|| {
        let c = handle(c, "certificate")?;
        let text = serde_json::to_string(&c.0).expect("certificate serializes");
        result = CString::new(text).expect("JSON has no nul bytes").into_raw();
        Ok(())
    });
    result
}

#[no_mangle]
pub unsafe extern "C" fn ssvp_certificate_free(c: *mut SsvpCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ssvp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `n × (n+1)` staircase matrix with the `n` given distinct positive singular values.
#[no_mangle]
pub unsafe extern "C" fn ssvp_realize_path(s: *const f64, n: usize, out: *mut *mut SsvpMatrix) -> SsvpStatus {
    guard(|| put(out, SsvpMatrix(realize_path(&sigmas(s, n)?)?.matrix)))
}

/// 3×3 matrix with the 6-cycle pattern and three singular values given non-increasing.
/// `config` is SolverConfig JSON or null for defaults.
#[no_mangle]
pub unsafe extern "C" fn ssvp_realize_c6(
    s: *const f64,
    config_json: *const c_char,
    out: *mut *mut SsvpMatrix,
) -> SsvpStatus {
    guard(|| {
        let v = slice(s, 3, "sigmas")?;
        put(out, SsvpMatrix(realize_c6(v, &config(config_json)?)?.matrix))
    })
}

/// A matrix with pattern `p` and the singular values of `m`, which must have the SSVP.
#[no_mangle]
pub unsafe extern "C" fn ssvp_superpattern(
    m: *const SsvpMatrix,
    p: *const SsvpPattern,
    config_json: *const c_char,
    out: *mut *mut SsvpMatrix,
) -> SsvpStatus {
    guard(|| {
        let (m, p) = (handle(m, "matrix")?, handle(p, "pattern")?);
        put(out, SsvpMatrix(superpattern_realize(&m.0, &p.0, &config(config_json)?)?.matrix))
    })
}

/// A matrix with the pattern of `m` and singular values `s` (length `min(rows, cols)`).
#[no_mangle]
pub unsafe extern "C" fn ssvp_bifurcate(
    m: *const SsvpMatrix,
    s: *const f64,
    n: usize,
    config_json: *const c_char,
    out: *mut *mut SsvpMatrix,
) -> SsvpStatus {
    guard(|| {
        let m = handle(m, "matrix")?;
        put(out, SsvpMatrix(bifurcate(&m.0, &sigmas(s, n)?, &config(config_json)?)?.matrix))
    })
}
