//! C ABI for the nordlid language identifier.
//!
//! Every fallible function returns a [`NordlidStatus`]; on failure a
//! message is available from [`nordlid_last_error`] on the same thread.
//! Strings returned through out-pointers are owned by the caller and must
//! be released with [`nordlid_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nordlid::model::{self, FastModel, ModelError};
use nordlid::normalize::{normalize, NormalizeConfig};
use nordlid::silver::canonical_compare;

/// Bit for Danish in label masks.
pub const NORDLID_LABEL_DA: u8 = 1;
/// Bit for Norwegian Bokmål.
pub const NORDLID_LABEL_NB: u8 = 1 << 1;
/// Bit for Norwegian Nynorsk.
pub const NORDLID_LABEL_NN: u8 = 1 << 2;
/// Bit for Swedish.
pub const NORDLID_LABEL_SV: u8 = 1 << 3;
/// Bit for any other language. Never combined with the others.
pub const NORDLID_LABEL_OTHER: u8 = 1 << 4;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NordlidStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    /// Bad magic, unsupported version or malformed header.
    BadFormat = 4,
    Checksum = 5,
    /// A string contained an interior NUL byte.
    InteriorNul = 6,
    Panic = 7,
}

/// Opaque model handle.
pub struct NordlidModel {
    inner: FastModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', "\\0")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: NordlidStatus, msg: impl Into<String>) -> NordlidStatus {
    set_error(msg);
    status
}

fn model_status(e: &ModelError) -> NordlidStatus {
    match e {
        ModelError::Io { .. } => NordlidStatus::Io,
        ModelError::Checksum(_) => NordlidStatus::Checksum,
        _ => NordlidStatus::BadFormat,
    }
}

/// Run `f`, turning panics into `Panic`.
fn guard(f: impl FnOnce() -> NordlidStatus) -> NordlidStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => fail(NordlidStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, NordlidStatus> {
    if p.is_null() {
        return Err(fail(NordlidStatus::NullPointer, format!("{name} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(NordlidStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn model_arg<'a>(m: *const NordlidModel) -> Result<&'a FastModel, NordlidStatus> {
    m.as_ref()
        .map(|m| &m.inner)
        .ok_or_else(|| fail(NordlidStatus::NullPointer, "model is NULL"))
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> NordlidStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            NordlidStatus::Ok
        }
        Err(_) => fail(NordlidStatus::InteriorNul, "result contains a NUL byte"),
    }
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(NordlidStatus::NullPointer, concat!(stringify!($p), " is NULL"));
        })+
    };
}

fn finish_load(
    result: Result<FastModel, ModelError>,
    out: *mut *mut NordlidModel,
) -> NordlidStatus {
    match result {
        Ok(inner) => {
            unsafe { *out = Box::into_raw(Box::new(NordlidModel { inner })) };
            NordlidStatus::Ok
        }
        Err(e) => fail(model_status(&e), e.to_string()),
    }
}

/// Load a model file. On success `*out` receives a handle to release with
/// [`nordlid_model_free`].
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nordlid_model_load(
    path: *const c_char,
    out: *mut *mut NordlidModel,
) -> NordlidStatus {
    guard(|| {
        non_null!(out);
        let path = try_ffi!(str_arg(path, "path"));
        finish_load(model::load_model(Path::new(path)), out)
    })
}

/// Load a model from an in-memory copy of a model file.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn nordlid_model_load_bytes(
    data: *const u8,
    len: usize,
    out: *mut *mut NordlidModel,
) -> NordlidStatus {
    guard(|| {
        non_null!(data, out);
        let bytes = std::slice::from_raw_parts(data, len);
        finish_load(model::read_model(bytes), out)
    })
}

/// Release a model handle. NULL is ignored.
///
/// # Safety
/// `model` must come from a load function and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nordlid_model_free(model: *mut NordlidModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Predict the label set of `text` as a bitmask of `NORDLID_LABEL_*`.
/// `top1`, if not NULL, receives the index (0 da, 1 nb, 2 nn, 3 sv,
/// 4 other) of the single most likely label.
///
/// # Safety
/// `model` must be a live handle, `text` a NUL-terminated string and
/// `labels` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nordlid_predict(
    model: *const NordlidModel,
    text: *const c_char,
    labels: *mut u8,
    top1: *mut u32,
) -> NordlidStatus {
    guard(|| {
        non_null!(labels);
        let m = try_ffi!(model_arg(model));
        let text = try_ffi!(str_arg(text, "text"));
        let (set, best) = m.classify(text);
        *labels = set.bits();
        if !top1.is_null() {
            *top1 = best.index() as u32;
        }
        NordlidStatus::Ok
    })
}

/// Predict labels as a comma-separated string such as `"da,nb"`.
///
/// # Safety
/// As [`nordlid_predict`]; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nordlid_predict_labels(
    model: *const NordlidModel,
    text: *const c_char,
    out: *mut *mut c_char,
) -> NordlidStatus {
    guard(|| {
        non_null!(out);
        let m = try_ffi!(model_arg(model));
        let text = try_ffi!(str_arg(text, "text"));
        put_string(out, m.classify(text).0.to_string())
    })
}

/// Per-language probabilities in the order da, nb, nn, sv.
///
/// # Safety
/// `probs` must point to space for four doubles.
#[no_mangle]
pub unsafe extern "C" fn nordlid_predict_proba(
    model: *const NordlidModel,
    text: *const c_char,
    probs: *mut f64,
) -> NordlidStatus {
    guard(|| {
        non_null!(probs);
        let m = try_ffi!(model_arg(model));
        let text = try_ffi!(str_arg(text, "text"));
        let p = m.probabilities(text);
        ptr::copy_nonoverlapping(p.as_ptr(), probs, p.len());
        NordlidStatus::Ok
    })
}

/// Decision threshold stored in the model, or NaN for a NULL handle.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nordlid_model_threshold(model: *const NordlidModel) -> f64 {
    model.as_ref().map_or(f64::NAN, |m| m.inner.threshold)
}

/// Apply training-time normalization (placeholders and lowercasing).
///
/// # Safety
/// `text` must be NUL-terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nordlid_normalize(
    text: *const c_char,
    out: *mut *mut c_char,
) -> NordlidStatus {
    guard(|| {
        non_null!(out);
        let text = try_ffi!(str_arg(text, "text"));
        put_string(out, normalize(text, &NormalizeConfig::training()))
    })
}

/// Whether two strings are equal after NFC and whitespace folding.
///
/// # Safety
/// `a` and `b` must be NUL-terminated and `equal` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nordlid_canonical_compare(
    a: *const c_char,
    b: *const c_char,
    equal: *mut bool,
) -> NordlidStatus {
    guard(|| {
        non_null!(equal);
        let a = try_ffi!(str_arg(a, "a"));
        let b = try_ffi!(str_arg(b, "b"));
        *equal = canonical_compare(a, b);
        NordlidStatus::Ok
    })
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nordlid_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nordlid_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nordlid_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
