//! C ABI over the workbench.
//!
//! Objects cross the boundary as opaque handles that must be released with the
//! matching `*_free` function. Every fallible call returns a [`ProjrepStatus`];
//! on failure a description is available from [`projrep_last_error`] on the
//! same thread until the next call. Strings returned through `out` pointers
//! are owned by the caller and released with [`projrep_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use projrep::cli::{self, WorkbenchConfig};
use projrep::cohomology::{self, CohomologyError, ExponentTable};
use projrep::io::{self, ExponentFile, RepFile};
use projrep::rep::RayRepresentation;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjrepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    NotCommuting = 5,
    Computation = 6,
    Panic = 7,
}

/// A validated ray representation.
pub struct ProjrepRep {
    inner: RayRepresentation,
}

/// A local exponent table.
pub struct ProjrepExponent {
    inner: ExponentTable,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).expect("nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: ProjrepStatus, msg: impl Into<String>) -> ProjrepStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> ProjrepStatus) -> ProjrepStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(ProjrepStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, ProjrepStatus> {
    if p.is_null() {
        return Err(fail(ProjrepStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(ProjrepStatus::InvalidUtf8, e.to_string()))
}

fn io_status(e: io::IoError) -> ProjrepStatus {
    let status = match e {
        io::IoError::Parse { .. } => ProjrepStatus::Parse,
        _ => ProjrepStatus::Validation,
    };
    fail(status, e.to_string())
}

fn write_string(out: *mut *mut c_char, text: String) -> ProjrepStatus {
    match CString::new(text) {
        Ok(c) => {
            unsafe { *out = c.into_raw() };
            ProjrepStatus::Ok
        }
        Err(_) => fail(ProjrepStatus::Computation, "output contained a NUL byte"),
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn projrep_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn projrep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn projrep_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and validate a representation from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn projrep_rep_from_json(json: *const c_char, out: *mut *mut ProjrepRep) -> ProjrepStatus {
    guard(|| {
        if out.is_null() {
            return fail(ProjrepStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match io::parse::<RepFile>(text).and_then(|f| io::rep_from_file(&f)) {
            Ok(rep) => {
                *out = Box::into_raw(Box::new(ProjrepRep { inner: rep }));
                ProjrepStatus::Ok
            }
            Err(e) => io_status(e),
        }
    })
}

/// # Safety
/// `rep` must come from [`projrep_rep_from_json`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn projrep_rep_free(rep: *mut ProjrepRep) {
    if !rep.is_null() {
        drop(Box::from_raw(rep));
    }
}

/// Group order of a representation, 0 for NULL.
///
/// # Safety
/// `rep` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn projrep_rep_order(rep: *const ProjrepRep) -> usize {
    rep.as_ref().map_or(0, |r| r.inner.group().order())
}

/// Hilbert-space dimension, 0 for NULL.
///
/// # Safety
/// `rep` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn projrep_rep_dim(rep: *const ProjrepRep) -> usize {
    rep.as_ref().map_or(0, |r| r.inner.dim())
}

/// Local exponent table of a representation.
///
/// # Safety
/// `rep` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projrep_rep_exponent(rep: *const ProjrepRep, out: *mut *mut ProjrepExponent) -> ProjrepStatus {
    guard(|| {
        let (Some(r), false) = (rep.as_ref(), out.is_null()) else {
            return fail(ProjrepStatus::NullPointer, "null argument");
        };
        match cohomology::exponent_of_rep(&r.inner) {
            Ok(d) => {
                *out = Box::into_raw(Box::new(ProjrepExponent { inner: d }));
                ProjrepStatus::Ok
            }
            Err(e) => fail(ProjrepStatus::Computation, e.to_string()),
        }
    })
}

/// Determinant trivialization report as JSON.
///
/// # Safety
/// `rep` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn projrep_rep_weyl(rep: *const ProjrepRep, out_json: *mut *mut c_char) -> ProjrepStatus {
    guard(|| {
        let (Some(r), false) = (rep.as_ref(), out_json.is_null()) else {
            return fail(ProjrepStatus::NullPointer, "null argument");
        };
        write_string(out_json, cli::weyl_report(&r.inner).to_json())
    })
}

/// Parse and validate an exponent table from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn projrep_exponent_from_json(
    json: *const c_char,
    out: *mut *mut ProjrepExponent,
) -> ProjrepStatus {
    guard(|| {
        if out.is_null() {
            return fail(ProjrepStatus::NullPointer, "null output pointer");
        }
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match io::parse::<ExponentFile>(text).and_then(|f| io::exponent_from_file(&f)) {
            Ok(d) => {
                *out = Box::into_raw(Box::new(ProjrepExponent { inner: d }));
                ProjrepStatus::Ok
            }
            Err(e) => io_status(e),
        }
    })
}

/// # Safety
/// `d` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn projrep_exponent_free(d: *mut ProjrepExponent) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Exact commutator phase `β(a,b)` as the reduced fraction `num/den` of a turn.
///
/// # Safety
/// `d` must be a live handle; `num` and `den` writable.
#[no_mangle]
pub unsafe extern "C" fn projrep_exponent_commutator(
    d: *const ProjrepExponent,
    a: usize,
    b: usize,
    num: *mut i64,
    den: *mut i64,
) -> ProjrepStatus {
    guard(|| {
        let Some(t) = d.as_ref() else {
            return fail(ProjrepStatus::NullPointer, "null handle");
        };
        if num.is_null() || den.is_null() {
            return fail(ProjrepStatus::NullPointer, "null output pointer");
        }
        let order = t.inner.group().order();
        if a >= order || b >= order {
            return fail(ProjrepStatus::Validation, format!("element out of range for order {order}"));
        }
        match cohomology::commutator_phase(&t.inner, a, b) {
            Ok(p) => match p.as_exact() {
                Some(turns) => {
                    *num = turns.num();
                    *den = turns.den();
                    ProjrepStatus::Ok
                }
                None => fail(ProjrepStatus::Computation, "table is not exact"),
            },
            Err(CohomologyError::NotCommuting(a, b)) => {
                fail(ProjrepStatus::NotCommuting, format!("elements {a} and {b} do not commute"))
            }
            Err(e) => fail(ProjrepStatus::Computation, e.to_string()),
        }
    })
}

/// Decide whether the table is a coboundary; the report is written as JSON.
///
/// # Safety
/// `d` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn projrep_exponent_trivialize(
    d: *const ProjrepExponent,
    out_json: *mut *mut c_char,
) -> ProjrepStatus {
    guard(|| {
        let (Some(t), false) = (d.as_ref(), out_json.is_null()) else {
            return fail(ProjrepStatus::NullPointer, "null argument");
        };
        let zero = ExponentTable::zero(t.inner.group().clone());
        let report = cli::equivalence_report(&t.inner, &zero, &WorkbenchConfig::default());
        write_string(out_json, report.to_json())
    })
}

/// Run one command-line invocation (without the program name) and return the
/// rendered report. `exit_code` receives the process exit code the CLI would
/// use.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings; `out` and `exit_code`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn projrep_run(
    argc: usize,
    argv: *const *const c_char,
    out: *mut *mut c_char,
    exit_code: *mut i32,
) -> ProjrepStatus {
    guard(|| {
        if out.is_null() || exit_code.is_null() || (argc > 0 && argv.is_null()) {
            return fail(ProjrepStatus::NullPointer, "null argument");
        }
        let mut args = vec!["projrep".to_string()];
        for i in 0..argc {
            match read_str(*argv.add(i)) {
                Ok(s) => args.push(s.to_string()),
                Err(s) => return s,
            }
        }
        let (code, text) = cli::run_args(args);
        *exit_code = code;
        write_string(out, text)
    })
}
