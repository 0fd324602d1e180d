//! C ABI over the classifier: opaque handles, integer status codes
//! matching the CLI exit contract (0 ok, 1 usage, 2 bad input,
//! 3 numeric failure), and a thread-local last-error message.
//!
//! Ownership rules: every `*_new` output is released by the matching
//! `*_free`; strings returned by `revend_report_json` are released by
//! `revend_string_free`; `revend_last_error` stays owned by the library
//! and is only valid until the next failing call on the same thread.

use revend::classify::ClassifierCfg;
use revend::cli::load_curve;
use revend::criteria::{classify_end, ConformalReport, Verdict};
use revend::error::Error;
use revend::geometry::{catalog, CatalogParams, EndSpec, Kappa};
use revend::report::ReportDocument;
use revend::warp::{warp_from_curve, WarpFn};
use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

/// Pass as `kappa` to `revend_curve_file_new` when the file itself sets
/// the model.
pub const REVEND_KAPPA_FROM_FILE: c_int = -2;

/// An end of revolution ready for classification. Opaque.
pub struct RevendEnd {
    end: EndSpec,
    warp: WarpFn,
}

/// A finished classification. Opaque.
pub struct RevendReport {
    cfg: ClassifierCfg,
    report: ConformalReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn store_error(err: &Error) -> c_int {
    let msg = err.to_string();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    });
    err.exit_code() as c_int
}

fn store_text(msg: &str, code: c_int) -> c_int {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    });
    code
}

/// Last failure message on this thread; empty until a call fails.
/// The pointer is invalidated by the next failing call on the thread.
#[no_mangle]
pub extern "C" fn revend_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Never unwind across the boundary; a panic reports as a numeric
/// failure with the panic text preserved.
fn guarded(body: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(code) => code,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "internal panic".to_string());
            store_text(&format!("internal panic: {msg}"), 3)
        }
    }
}

unsafe fn text_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, c_int> {
    if ptr.is_null() {
        return Err(store_text(&format!("{what} must not be null"), 1));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| store_text(&format!("{what} must be valid UTF-8"), 1))
}

fn finish_end(end: EndSpec, out: *mut *mut RevendEnd) -> c_int {
    match warp_from_curve(&end.curve) {
        Ok(warp) => {
            let handle = Box::new(RevendEnd { end, warp });
            unsafe { *out = Box::into_raw(handle) };
            0
        }
        Err(e) => store_error(&e),
    }
}

/// Build an end from a catalog entry.
///
/// `params` is a comma- or semicolon-separated list of `key=value`
/// pairs, or null for defaults. On success writes a handle to `*out`
/// and returns 0; otherwise returns the error code and leaves `*out`
/// untouched.
///
/// # Safety
/// `name` and (when non-null) `params` must point to NUL-terminated
/// strings; `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn revend_catalog_new(
    name: *const c_char,
    params: *const c_char,
    out: *mut *mut RevendEnd,
) -> c_int {
    guarded(|| {
        if out.is_null() {
            return store_text("out must not be null", 1);
        }
        let name = match text_arg(name, "name") {
            Ok(s) => s,
            Err(code) => return code,
        };
        let mut parsed = CatalogParams::new();
        if !params.is_null() {
            let text = match text_arg(params, "params") {
                Ok(s) => s,
                Err(code) => return code,
            };
            let pairs: Vec<&str> = text
                .split([',', ';'])
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .collect();
            parsed = match CatalogParams::parse_pairs(&pairs) {
                Ok(p) => p,
                Err(e) => return store_error(&e),
            };
        }
        match catalog(name, &parsed) {
            Ok(end) => finish_end(end, out),
            Err(e) => store_error(&e),
        }
    })
}

/// Build an end from a curve specification file.
///
/// `kappa` is -1, 0 or 1, or `REVEND_KAPPA_FROM_FILE` (-2) when the
/// file sets the model itself. Same output contract as
/// `revend_catalog_new`.
///
/// # Safety
/// `path` must point to a NUL-terminated string; `out` must be a valid
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn revend_curve_file_new(
    path: *const c_char,
    kappa: c_int,
    out: *mut *mut RevendEnd,
) -> c_int {
    guarded(|| {
        if out.is_null() {
            return store_text("out must not be null", 1);
        }
        let path = match text_arg(path, "path") {
            Ok(s) => s,
            Err(code) => return code,
        };
        let flag = match kappa {
            REVEND_KAPPA_FROM_FILE => None,
            v => match Kappa::from_value(v as i64) {
                Ok(k) => Some(k),
                Err(e) => return store_error(&e),
            },
        };
        match load_curve(Path::new(path), flag) {
            Ok(end) => finish_end(end, out),
            Err(e) => store_error(&e),
        }
    })
}

/// Classify an end with the default configuration. On success writes a
/// report handle to `*out` and returns 0.
///
/// # Safety
/// `end` must be a live handle from a `revend_*_new` call; `out` must
/// be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn revend_classify(
    end: *const RevendEnd,
    out: *mut *mut RevendReport,
) -> c_int {
    guarded(|| {
        if end.is_null() || out.is_null() {
            return store_text("end and out must not be null", 1);
        }
        let cfg = ClassifierCfg::default();
        match classify_end(&(*end).end, &cfg) {
            Ok(report) => {
                *out = Box::into_raw(Box::new(RevendReport { cfg, report }));
                0
            }
            Err(e) => store_error(&e),
        }
    })
}

/// Verdict of a report: 0 parabolic, 1 non-parabolic, 2 inconclusive;
/// -1 on a null handle.
///
/// # Safety
/// `report` must be null or a live handle from `revend_classify`.
#[no_mangle]
pub unsafe extern "C" fn revend_report_verdict(report: *const RevendReport) -> c_int {
    if report.is_null() {
        return -1;
    }
    match (*report).report.verdict {
        Verdict::Parabolic => 0,
        Verdict::NonParabolic => 1,
        Verdict::Inconclusive => 2,
    }
}

/// Render a report as a JSON document (single-end, embedded config).
/// Returns a heap string to release with `revend_string_free`, or null
/// on failure.
///
/// # Safety
/// `report` must be a live handle from `revend_classify`.
#[no_mangle]
pub unsafe extern "C" fn revend_report_json(report: *const RevendReport) -> *mut c_char {
    if report.is_null() {
        store_text("report must not be null", 1);
        return ptr::null_mut();
    }
    let doc = ReportDocument::new((*report).cfg, vec![(*report).report.clone()]);
    match doc.to_json() {
        Ok(text) => match CString::new(text) {
            Ok(c) => c.into_raw(),
            Err(_) => {
                store_text("report contained an interior NUL", 3);
                ptr::null_mut()
            }
        },
        Err(e) => {
            store_error(&e);
            ptr::null_mut()
        }
    }
}

/// Evaluate the warping function of an end at arc length `s`, writing
/// the value to `*out`.
///
/// # Safety
/// `end` must be a live handle; `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn revend_warp_eval(
    end: *const RevendEnd,
    s: c_double,
    out: *mut c_double,
) -> c_int {
    guarded(|| {
        if end.is_null() || out.is_null() {
            return store_text("end and out must not be null", 1);
        }
        match (*end).warp.w(s) {
            Ok(v) => {
                *out = v;
                0
            }
            Err(e) => store_error(&e),
        }
    })
}

/// Release an end handle. Null is a no-op.
///
/// # Safety
/// `end` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn revend_end_free(end: *mut RevendEnd) {
    if !end.is_null() {
        drop(Box::from_raw(end));
    }
}

/// Release a report handle. Null is a no-op.
///
/// # Safety
/// `report` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn revend_report_free(report: *mut RevendReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Release a string returned by `revend_report_json`. Null is a no-op.
///
/// # Safety
/// `text` must be null or a string this library returned, not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn revend_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
