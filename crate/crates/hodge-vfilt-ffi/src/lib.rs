//! C ABI over the core library.
//!
//! Every function returns an [`HvfStatus`]; results travel as UTF-8 JSON
//! strings allocated here and released by the caller with
//! [`hvf_string_free`]. On any status other than `Ok` a message for the
//! most recent failure on the calling thread is readable through
//! [`hvf_last_error_message`]. Panics never unwind across the boundary;
//! they are caught and reported as `Panic`.
//!
//! The JSON documents are the same ones the command line speaks: model
//! documents for [`hvf_model_parse`], classification inputs for
//! [`hvf_classify`], root multisets for the b-function calls.

use std::any::Any;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};

use serde_json::Value;

use hodge_vfilt::json::{
    classification_to_json, cohomology_to_json, model_from_json, model_to_json, roots_from_json,
    roots_to_json, scan_to_json, validation_to_json, whci_input_from_json,
};
use hodge_vfilt::koszul::{
    acyclicity_scan, build_a, build_b, cohomology, local_cohomology_filtration, sigma_shriek,
};
use hodge_vfilt::model::{validate, MonodromicModel};
use hodge_vfilt::rat::parse_rat;
use hodge_vfilt::whci::classify;

/// Outcome of a library call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HvfStatus {
    /// The call succeeded and every out-parameter is filled.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input failed JSON or schema checks.
    Schema = 3,
    /// The input was well formed but violates a mathematical rule.
    Domain = 4,
    /// A panic was caught at the boundary.
    Panic = 5,
}

/// Opaque handle to a parsed model document.
pub struct HvfModel {
    inner: MonodromicModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: HvfStatus, message: impl fmt::Display) -> HvfStatus {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(text).ok());
    status
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn panic_text(payload: &(dyn Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "panic in library call".to_string()
    }
}

fn guard(body: impl FnOnce() -> HvfStatus) -> HvfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => fail(HvfStatus::Panic, panic_text(payload.as_ref())),
    }
}

unsafe fn read_str<'a>(name: &str, p: *const c_char) -> Result<&'a str, HvfStatus> {
    if p.is_null() {
        return Err(fail(HvfStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(HvfStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn read_json(name: &str, p: *const c_char) -> Result<Value, HvfStatus> {
    let text = read_str(name, p)?;
    serde_json::from_str(text)
        .map_err(|e| fail(HvfStatus::Schema, format!("{name}: invalid JSON: {e}")))
}

unsafe fn write_json(out: *mut *mut c_char, value: &Value) -> HvfStatus {
    if out.is_null() {
        return fail(HvfStatus::NullArgument, "out is null");
    }
    let text = serde_json::to_string(value).expect("serializable value");
    let c = CString::new(text).expect("serialized JSON has no interior NUL");
    *out = c.into_raw();
    HvfStatus::Ok
}

unsafe fn model_ref<'a>(m: *const HvfModel) -> Result<&'a MonodromicModel, HvfStatus> {
    if m.is_null() {
        Err(fail(HvfStatus::NullArgument, "model is null"))
    } else {
        Ok(&(*m).inner)
    }
}

/// Rejects models that fail rule validation; analysis entry points only
/// accept documents the validator clears.
fn checked(m: &MonodromicModel) -> Result<(), HvfStatus> {
    let report = validate(m);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(fail(
            HvfStatus::Domain,
            format!(
                "model violates {} rule(s); first: {} at grade {}",
                report.violations.len(),
                v.rule.as_str(),
                v.grade
            ),
        )),
    }
}

/// Library version as a static NUL-terminated string. Do not free.
#[no_mangle]
pub extern "C" fn hvf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message for the most recent failure on this thread, or null when the
/// last call succeeded. The caller owns the returned string.
#[no_mangle]
pub extern "C" fn hvf_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(text) => text.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be a pointer previously returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn hvf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a model document and checks its schema. Rule validation is
/// separate; see [`hvf_model_validate`].
///
/// # Safety
/// `json` must be NUL-terminated; `out` must point to writable storage
/// for one pointer. On `Ok` the caller owns the handle and releases it
/// with [`hvf_model_free`].
#[no_mangle]
pub unsafe extern "C" fn hvf_model_parse(
    json: *const c_char,
    out: *mut *mut HvfModel,
) -> HvfStatus {
    guard(|| {
        clear_last_error();
        if out.is_null() {
            return fail(HvfStatus::NullArgument, "out is null");
        }
        let value = match read_json("model", json) {
            Ok(v) => v,
            Err(status) => return status,
        };
        match model_from_json(&value) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(HvfModel { inner: model }));
                HvfStatus::Ok
            }
            Err(e) => fail(HvfStatus::Schema, e),
        }
    })
}

/// Releases a model handle. Null is a no-op.
///
/// # Safety
/// `m` must come from [`hvf_model_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hvf_model_free(m: *mut HvfModel) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Serializes the model back to its document form.
///
/// # Safety
/// `m` must be a live handle; `out` must point to writable storage for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn hvf_model_json(m: *const HvfModel, out: *mut *mut c_char) -> HvfStatus {
    guard(|| {
        clear_last_error();
        match model_ref(m) {
            Ok(model) => write_json(out, &model_to_json(model)),
            Err(status) => status,
        }
    })
}

/// Runs rule validation and writes the report. A report with violations
/// still returns `Ok`; the report itself is the result.
///
/// # Safety
/// `m` must be a live handle; `out` must point to writable storage for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn hvf_model_validate(
    m: *const HvfModel,
    out: *mut *mut c_char,
) -> HvfStatus {
    guard(|| {
        clear_last_error();
        match model_ref(m) {
            Ok(model) => write_json(out, &validation_to_json(&validate(model))),
            Err(status) => status,
        }
    })
}

/// Classifies both restriction complexes at every jump grade of a valid
/// model and writes the scan rows.
///
/// # Safety
/// `m` must be a live handle; `out` must point to writable storage for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn hvf_model_scan(m: *const HvfModel, out: *mut *mut c_char) -> HvfStatus {
    guard(|| {
        clear_last_error();
        let model = match model_ref(m) {
            Ok(model) => model,
            Err(status) => return status,
        };
        if let Err(status) = checked(model) {
            return status;
        }
        write_json(out, &scan_to_json(&acyclicity_scan(model)))
    })
}

/// Computes the cohomology of one restriction complex of a valid model at
/// the given level: the graded complex, or the cumulative one when
/// `cumulative` is true.
///
/// # Safety
/// `m` must be a live handle; `level` must be NUL-terminated; `out` must
/// point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hvf_model_complex(
    m: *const HvfModel,
    level: *const c_char,
    cumulative: bool,
    out: *mut *mut c_char,
) -> HvfStatus {
    guard(|| {
        clear_last_error();
        let model = match model_ref(m) {
            Ok(model) => model,
            Err(status) => return status,
        };
        let text = match read_str("level", level) {
            Ok(t) => t,
            Err(status) => return status,
        };
        let lambda = match parse_rat(text) {
            Ok(x) => x,
            Err(e) => return fail(HvfStatus::Schema, format!("level: {e}")),
        };
        if let Err(status) = checked(model) {
            return status;
        }
        let built = if cumulative { build_a(model, &lambda) } else { build_b(model, &lambda) };
        match built {
            Ok(complex) => write_json(out, &cohomology_to_json(&cohomology(&complex))),
            Err(e) => fail(HvfStatus::Domain, e),
        }
    })
}

/// Computes the cohomology of the vertex restriction of a valid model,
/// with its Hodge and weight data.
///
/// # Safety
/// `m` must be a live handle; `out` must point to writable storage for
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn hvf_model_restriction(
    m: *const HvfModel,
    out: *mut *mut c_char,
) -> HvfStatus {
    guard(|| {
        clear_last_error();
        let model = match model_ref(m) {
            Ok(model) => model,
            Err(status) => return status,
        };
        if let Err(status) = checked(model) {
            return status;
        }
        match sigma_shriek(model) {
            Ok(h) => write_json(out, &cohomology_to_json(&h)),
            Err(e) => fail(HvfStatus::Domain, e),
        }
    })
}

/// Local cohomology count of a valid model at Hodge level `p` with kernel
/// power `ell + 1`.
///
/// # Safety
/// `m` must be a live handle; `out` must point to writable storage for
/// one `size_t`.
#[no_mangle]
pub unsafe extern "C" fn hvf_model_local_count(
    m: *const HvfModel,
    p: i64,
    ell: u32,
    out: *mut usize,
) -> HvfStatus {
    guard(|| {
        clear_last_error();
        if out.is_null() {
            return fail(HvfStatus::NullArgument, "out is null");
        }
        let model = match model_ref(m) {
            Ok(model) => model,
            Err(status) => return status,
        };
        if let Err(status) = checked(model) {
            return status;
        }
        match local_cohomology_filtration(model, p, ell) {
            Ok(count) => {
                *out = count;
                HvfStatus::Ok
            }
            Err(e) => fail(HvfStatus::Domain, e),
        }
    })
}

/// Classifies a weighted homogeneous complete intersection document and
/// writes the classification report.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must point to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hvf_classify(json: *const c_char, out: *mut *mut c_char) -> HvfStatus {
    guard(|| {
        clear_last_error();
        let value = match read_json("input", json) {
            Ok(v) => v,
            Err(status) => return status,
        };
        let input = match whci_input_from_json(&value) {
            Ok(input) => input,
            Err(e) => return fail(HvfStatus::Schema, e),
        };
        match classify(&input) {
            Ok(report) => write_json(out, &classification_to_json(&report)),
            Err(e) => fail(HvfStatus::Domain, e),
        }
    })
}

/// Combines two root multiset documents with the additive convolution and
/// writes the resulting multiset.
///
/// # Safety
/// `a` and `b` must be NUL-terminated; `out` must point to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hvf_roots_combine(
    a: *const c_char,
    b: *const c_char,
    out: *mut *mut c_char,
) -> HvfStatus {
    guard(|| {
        clear_last_error();
        let left = match read_json("a", a).and_then(|v| {
            roots_from_json(&v).map_err(|e| fail(HvfStatus::Schema, format!("a: {e}")))
        }) {
            Ok(r) => r,
            Err(status) => return status,
        };
        let right = match read_json("b", b).and_then(|v| {
            roots_from_json(&v).map_err(|e| fail(HvfStatus::Schema, format!("b: {e}")))
        }) {
            Ok(r) => r,
            Err(status) => return status,
        };
        match left.thom_sebastiani(&right) {
            Ok(combined) => write_json(out, &roots_to_json(&combined)),
            Err(e) => fail(HvfStatus::Domain, e),
        }
    })
}

/// Rescales a root multiset document by `factor` and then shifts every
/// root by `shift`, writing the transformed multiset.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must point to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn hvf_roots_rescale(
    json: *const c_char,
    factor: u64,
    shift: i64,
    out: *mut *mut c_char,
) -> HvfStatus {
    guard(|| {
        clear_last_error();
        let roots = match read_json("roots", json).and_then(|v| {
            roots_from_json(&v).map_err(|e| fail(HvfStatus::Schema, e))
        }) {
            Ok(r) => r,
            Err(status) => return status,
        };
        match roots.rescale(factor) {
            Ok(scaled) => write_json(out, &roots_to_json(&scaled.shift(shift))),
            Err(e) => fail(HvfStatus::Domain, e),
        }
    })
}
