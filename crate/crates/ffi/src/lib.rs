//! C interface to the tropmedian library.
//!
//! Conventions:
//! * every function returns a [`TmStatus`]; results come back through out
//!   pointers, which are written only on `TM_STATUS_OK`;
//! * handles (`TmSites`, `TmPolytrope`) are opaque and released with their
//!   `_free` function; strings returned by the library are released with
//!   [`tm_string_free`];
//! * after a failure, [`tm_last_error`] describes it until the next call
//!   on the same thread;
//! * numbers cross the boundary as `int64_t` or as exact decimal / `p/q`
//!   text, never as floating point.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tropmedian::consensus::{tropical_median, ConsensusOptions};
use tropmedian::fw::{contains, dimension, fw_point, fw_polytrope, tropical_vertices, Polytrope};
use tropmedian::io::read_matrix;
use tropmedian::rational::int;
use tropmedian::trees::parse_tree_file;
use tropmedian::tropical::{SiteMatrix, TropicalPoint};
use tropmedian::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Arguments are malformed: bad sizes, text that is not UTF-8, parse errors.
    InvalidArgument = 2,
    /// The input is well formed but rejected by the computation.
    DomainError = 3,
    /// A bug in the library; the message has details.
    Internal = 4,
}

/// A site matrix with optional multiplicities.
pub struct TmSites {
    inner: SiteMatrix,
}

/// A Fermat–Weber polytrope.
pub struct TmPolytrope {
    inner: Polytrope,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean = CString::new(message.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn classify(e: &Error) -> TmStatus {
    match e {
        Error::Number(_)
        | Error::Syntax { .. }
        | Error::Ragged { .. }
        | Error::DimensionMismatch { .. }
        | Error::MissingLength(_)
        | Error::NegativeLength(_)
        | Error::DuplicateLabel(_) => TmStatus::InvalidArgument,
        Error::Invariant(_) => TmStatus::Internal,
        _ => TmStatus::DomainError,
    }
}

/// Runs `f`, turning errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), (TmStatus, String)>) -> TmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TmStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("panic inside tropmedian");
            TmStatus::Internal
        }
    }
}

fn lib(e: Error) -> (TmStatus, String) {
    (classify(&e), e.to_string())
}

fn null(name: &str) -> (TmStatus, String) {
    (TmStatus::NullPointer, format!("{name} is null"))
}

fn invalid(message: impl Into<String>) -> (TmStatus, String) {
    (TmStatus::InvalidArgument, message.into())
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, (TmStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{name} is not UTF-8")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], (TmStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("library output has no NUL bytes").into_raw()
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn tm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn tm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds sites from an `m × n` row-major matrix of integers.
///
/// # Safety
/// `values` must point to `m * n` readable integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_sites_from_i64(values: *const i64, m: usize, n: usize, out: *mut *mut TmSites) -> TmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = m.checked_mul(n).ok_or_else(|| invalid("m * n overflows"))?;
        let data = slice(values, len, "values")?;
        let rows = data.chunks(n.max(1)).map(|r| r.iter().map(|&v| int(v)).collect()).collect();
        let inner = SiteMatrix::new(rows).map_err(lib)?;
        *out = Box::into_raw(Box::new(TmSites { inner }));
        Ok(())
    })
}

/// Parses sites from comma- or tab-separated text with exact decimal or
/// `p/q` entries, one site per line.
///
/// # Safety
/// `csv` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_sites_from_text(csv: *const c_char, out: *mut *mut TmSites) -> TmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let rows = read_matrix(text(csv, "csv")?, false).map_err(lib)?;
        let inner = SiteMatrix::new(rows).map_err(lib)?;
        *out = Box::into_raw(Box::new(TmSites { inner }));
        Ok(())
    })
}

/// Replaces the multiplicities; `count` must equal the number of sites.
///
/// # Safety
/// `sites` must be a live handle; `weights` must point to `count` integers.
#[no_mangle]
pub unsafe extern "C" fn tm_sites_set_weights(sites: *mut TmSites, weights: *const u64, count: usize) -> TmStatus {
    guard(|| {
        let sites = sites.as_mut().ok_or_else(|| null("sites"))?;
        let w = slice(weights, count, "weights")?.to_vec();
        sites.inner = SiteMatrix::with_weights(sites.inner.rows().to_vec(), w).map_err(lib)?;
        Ok(())
    })
}

/// Number of sites and coordinates.
///
/// # Safety
/// `sites` must be a live handle; `m` and `n` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_sites_shape(sites: *const TmSites, m: *mut usize, n: *mut usize) -> TmStatus {
    guard(|| {
        let sites = sites.as_ref().ok_or_else(|| null("sites"))?;
        if m.is_null() || n.is_null() {
            return Err(null("m or n"));
        }
        *m = sites.inner.m();
        *n = sites.inner.n();
        Ok(())
    })
}

/// # Safety
/// `sites` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tm_sites_free(sites: *mut TmSites) {
    if !sites.is_null() {
        drop(Box::from_raw(sites));
    }
}

/// One Fermat–Weber point as space-separated exact coordinates with
/// coordinate sum zero. Free the string with [`tm_string_free`].
///
/// # Safety
/// `sites` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_fw_point(sites: *const TmSites, out: *mut *mut c_char) -> TmStatus {
    guard(|| {
        let sites = sites.as_ref().ok_or_else(|| null("sites"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let x = fw_point(&sites.inner).map_err(lib)?;
        *out = into_c_string(x.to_string());
        Ok(())
    })
}

/// The full Fermat–Weber polytrope.
///
/// # Safety
/// `sites` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_fw_polytrope(sites: *const TmSites, out: *mut *mut TmPolytrope) -> TmStatus {
    guard(|| {
        let sites = sites.as_ref().ok_or_else(|| null("sites"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = fw_polytrope(&sites.inner).map_err(lib)?;
        *out = Box::into_raw(Box::new(TmPolytrope { inner }));
        Ok(())
    })
}

/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_polytrope_dimension(p: *const TmPolytrope, out: *mut usize) -> TmStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytrope"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = dimension(&p.inner);
        Ok(())
    })
}

/// Number of distinct tropical vertices.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_polytrope_vertex_count(p: *const TmPolytrope, out: *mut usize) -> TmStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytrope"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = tropical_vertices(&p.inner).len();
        Ok(())
    })
}

/// Whether the integer point `x` (length `n`) lies in the polytrope.
///
/// # Safety
/// `p` must be a live handle; `x` must point to `n` integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_polytrope_contains_i64(
    p: *const TmPolytrope,
    x: *const i64,
    n: usize,
    out: *mut bool,
) -> TmStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytrope"))?;
        let coords = slice(x, n, "x")?.iter().map(|&v| int(v)).collect();
        let point = TropicalPoint::normalize(coords).map_err(lib)?;
        *out.as_mut().ok_or_else(|| null("out"))? = contains(&p.inner, &point).map_err(lib)?;
        Ok(())
    })
}

/// Bounds, tropical vertices, dimension and optimal value as JSON.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_polytrope_json(p: *const TmPolytrope, out: *mut *mut c_char) -> TmStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("polytrope"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(p.inner.to_json().to_string());
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tm_polytrope_free(p: *mut TmPolytrope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Tropical median consensus of the Newick trees in `trees` (one per line,
/// `#` comments allowed). `weights` may be null when `weight_count` is 0.
/// The canonical Newick result is written to `out`.
///
/// # Safety
/// `trees` must be a NUL-terminated string; `weights` must point to
/// `weight_count` integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_consensus(
    trees: *const c_char,
    weights: *const u64,
    weight_count: usize,
    adjust_equidistant: bool,
    out: *mut *mut c_char,
) -> TmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let parsed = parse_tree_file(text(trees, "trees")?).map_err(|e| invalid(e.to_string()))?;
        let w = slice(weights, weight_count, "weights")?;
        let options =
            ConsensusOptions { weights: (!w.is_empty()).then(|| w.to_vec()), adjust_equidistant, ..Default::default() };
        let result = tropical_median(&parsed, &options).map_err(lib)?;
        *out = into_c_string(result.tree.to_string());
        Ok(())
    })
}
