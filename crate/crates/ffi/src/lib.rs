//! C interface to `diffam`.
//!
//! Every fallible function returns a status code: [`DIFFAM_OK`], one of the
//! negative interface codes below, or the positive code of the library
//! error. After a nonzero status, [`diffam_last_error_message`] describes the
//! failure on the calling thread.
//!
//! Strings returned through `char **` out-parameters are owned by the caller
//! and must be released with [`diffam_string_free`]. Handles are released
//! with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use diffam::amd::{self, AmdCode};
use diffam::cli::{self, Request};
use diffam::diffcore::SetFamily;
use diffam::families::{self, FamilyKind, VerifyOptions};
use diffam::{json, Error};

pub const DIFFAM_OK: i32 = 0;
/// A required pointer argument was null.
pub const DIFFAM_ERR_NULL: i32 = -1;
/// A string argument was not valid UTF-8.
pub const DIFFAM_ERR_UTF8: i32 = -2;
/// The library panicked; the handle arguments should not be reused.
pub const DIFFAM_ERR_PANIC: i32 = -3;

/// Opaque set family over a finite abelian group.
pub struct DiffamFamily {
    inner: SetFamily,
}

/// Opaque AMD code.
pub struct DiffamCode {
    inner: AmdCode,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Fail {
    Null,
    Utf8,
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            DIFFAM_OK
        }
        Ok(Err(Fail::Null)) => {
            set_last_error("null pointer argument");
            DIFFAM_ERR_NULL
        }
        Ok(Err(Fail::Utf8)) => {
            set_last_error("string argument is not valid UTF-8");
            DIFFAM_ERR_UTF8
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(&e.to_string());
            e.code()
        }
        Err(_) => {
            set_last_error("internal panic");
            DIFFAM_ERR_PANIC
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Utf8)
}

unsafe fn out<T>(p: *mut T, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(Fail::Null);
    }
    p.write(v);
    Ok(())
}

unsafe fn out_string(p: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail::Utf8)?;
    out(p, c.into_raw())
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null)
}

fn kind_of(name: &str) -> Result<FamilyKind, Fail> {
    serde_json::from_value(serde_json::Value::String(name.to_ascii_lowercase()))
        .map_err(|_| Fail::Lib(Error::Input(format!("unknown family type {name:?}"))))
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    json::to_pretty(v)
}

/// Message for the last nonzero status on this thread, or an empty string.
/// The pointer stays valid until the next call into the library on the same
/// thread.
#[no_mangle]
pub extern "C" fn diffam_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn diffam_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn diffam_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Run one command given as a JSON request object, as the command-line tool
/// would. Writes the JSON envelope and the command exit code.
///
/// # Safety
/// `request_json` must be a nul-terminated string; the out-pointers must be
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn diffam_execute(
    request_json: *const c_char,
    envelope_json: *mut *mut c_char,
    exit_code: *mut i32,
) -> i32 {
    guard(|| {
        let v = json::parse_value(text(request_json)?)?;
        let req: Request = serde_json::from_value(v).map_err(|e| Error::Input(format!("request: {e}")))?;
        let env = cli::execute(&req);
        out(exit_code, env.exit_code)?;
        out_string(envelope_json, pretty(&env))
    })
}

/// Parse a family from JSON: `{"group": ..., "sets": [...]}`.
///
/// # Safety
/// `family_json` must be a nul-terminated string; `out_family` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn diffam_family_from_json(family_json: *const c_char, out_family: *mut *mut DiffamFamily) -> i32 {
    guard(|| {
        let inner = json::parse_family(text(family_json)?, None)?;
        out(out_family, Box::into_raw(Box::new(DiffamFamily { inner })))
    })
}

/// # Safety
/// `family` must come from this library and not have been freed. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn diffam_family_free(family: *mut DiffamFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// Group order and number of sets.
///
/// # Safety
/// `family` must be a live handle; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn diffam_family_shape(family: *const DiffamFamily, order: *mut usize, sets: *mut usize) -> i32 {
    guard(|| {
        let f = &get(family)?.inner;
        out(order, f.group().order())?;
        out(sets, f.len())
    })
}

/// Check `family` against a family type (`"edf"`, `"sedf"`, ...).
/// `options_json` may be null or an object with `lambda`, `lambdas`,
/// `classes` and `relax_sizes`. Sets `passed` to 1 or 0 and writes the
/// report.
///
/// # Safety
/// `family` must be a live handle, the strings nul-terminated and the
/// out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn diffam_family_verify(
    family: *const DiffamFamily,
    kind: *const c_char,
    options_json: *const c_char,
    passed: *mut i32,
    report_json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let f = &get(family)?.inner;
        let kind = kind_of(text(kind)?)?;
        let opts: VerifyOptions = if options_json.is_null() {
            VerifyOptions::default()
        } else {
            let v = json::parse_value(text(options_json)?)?;
            serde_json::from_value(v).map_err(|e| Error::Input(format!("options: {e}")))?
        };
        let report = families::verify(f, kind, &opts)?;
        out(passed, i32::from(report.passed()))?;
        out_string(report_json, pretty(&report))
    })
}

/// Parse a code from JSON: `{"group": ..., "sources": [...]}`.
///
/// # Safety
/// `code_json` must be a nul-terminated string; `out_code` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn diffam_code_from_json(code_json: *const c_char, out_code: *mut *mut DiffamCode) -> i32 {
    guard(|| {
        let inner = json::parse_code(text(code_json)?)?;
        out(out_code, Box::into_raw(Box::new(DiffamCode { inner })))
    })
}

/// The code with one equiprobable source per set of `family`.
///
/// # Safety
/// `family` must be a live handle; `out_code` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn diffam_code_from_family(family: *const DiffamFamily, out_code: *mut *mut DiffamCode) -> i32 {
    guard(|| {
        let inner = AmdCode::from_family(&get(family)?.inner)?;
        out(out_code, Box::into_raw(Box::new(DiffamCode { inner })))
    })
}

/// # Safety
/// `code` must come from this library and not have been freed. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn diffam_code_free(code: *mut DiffamCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

unsafe fn write_fraction(r: diffam::Rational, num: *mut i64, den: *mut i64) -> Result<(), Fail> {
    let n = i64::try_from(r.numer()).map_err(|_| Error::Input(format!("{r} does not fit 64 bits")))?;
    let d = i64::try_from(r.denom()).map_err(|_| Error::Input(format!("{r} does not fit 64 bits")))?;
    out(num, n)?;
    out(den, d)
}

/// Optimal weak-game success probability as a reduced fraction.
///
/// # Safety
/// `code` must be a live handle; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn diffam_code_weak_optimum(code: *const DiffamCode, num: *mut i64, den: *mut i64) -> i32 {
    guard(|| write_fraction(amd::eval_weak_optimum(&get(code)?.inner).value, num, den))
}

/// Optimal strong-game success probability, maximised over sources.
///
/// # Safety
/// `code` must be a live handle; the out-pointers must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn diffam_code_strong_optimum(code: *const DiffamCode, num: *mut i64, den: *mut i64) -> i32 {
    guard(|| write_fraction(amd::eval_strong_optimum(&get(code)?.inner).value, num, den))
}

/// Optimality classification of `code` as JSON.
///
/// # Safety
/// `code` must be a live handle; `classification_json` must be valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn diffam_code_classify(code: *const DiffamCode, classification_json: *mut *mut c_char) -> i32 {
    guard(|| {
        let c = amd::classify(&get(code)?.inner)?;
        out_string(classification_json, pretty(&c))
    })
}
