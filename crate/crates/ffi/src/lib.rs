//! C ABI over `spanclf`.
//!
//! Every fallible function returns a [`SpanclfStatus`]. On failure a
//! human-readable message is kept in thread-local storage and can be read
//! with [`spanclf_last_error_message`] until the next call on that thread.
//! Handles are opaque; release them with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use spanclf::corpus::{CorpusError, Manifest};
use spanclf::model::{read_model, LinearModel, ModelError};
use spanclf::preprocess::{expand_span, featurize, tokenize, ContextMode, FeatureVector};
use spanclf::weights::class_weights_from_counts;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanclfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Format = 5,
    ManifestMismatch = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Context window used by [`spanclf_expand_span`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpanclfContextMode {
    None = 0,
    Sentence = 1,
    Subsentence = 2,
}

impl From<SpanclfContextMode> for ContextMode {
    fn from(mode: SpanclfContextMode) -> Self {
        match mode {
            SpanclfContextMode::None => ContextMode::None,
            SpanclfContextMode::Sentence => ContextMode::Sentence,
            SpanclfContextMode::Subsentence => ContextMode::Subsentence,
        }
    }
}

/// Opaque label manifest.
pub struct SpanclfManifest {
    inner: Manifest,
    names: Vec<CString>,
}

/// Opaque trained model.
pub struct SpanclfModel {
    inner: LinearModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: impl Into<String>) {
    // interior NULs would truncate the C string, so replace them
    let text = message.into().replace('\0', " ");
    let c = CString::new(text).expect("NULs were removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(status: SpanclfStatus, message: impl Into<String>) -> SpanclfStatus {
    set_last_error(message);
    status
}

/// Run `body`, turning a panic into [`SpanclfStatus::Panic`] so it never
/// unwinds across the C boundary.
fn guard(body: impl FnOnce() -> SpanclfStatus) -> SpanclfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => {
            if status == SpanclfStatus::Ok {
                LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            }
            status
        }
        Err(_) => fail(SpanclfStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, SpanclfStatus> {
    if p.is_null() {
        return Err(fail(SpanclfStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SpanclfStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn corpus_status(e: &CorpusError) -> SpanclfStatus {
    match e {
        CorpusError::Io { .. } => SpanclfStatus::Io,
        _ => SpanclfStatus::Format,
    }
}

fn model_status(e: &ModelError) -> SpanclfStatus {
    match e {
        ModelError::Io { .. } => SpanclfStatus::Io,
        ModelError::ManifestMismatch { .. } => SpanclfStatus::ManifestMismatch,
        ModelError::Format(_) => SpanclfStatus::Format,
        _ => SpanclfStatus::InvalidArgument,
    }
}

fn manifest_handle(inner: Manifest) -> *mut SpanclfManifest {
    let names = inner
        .class_names()
        .iter()
        .map(|n| CString::new(n.as_str()).unwrap_or_default())
        .collect();
    Box::into_raw(Box::new(SpanclfManifest { inner, names }))
}

/// Message describing the most recent failure on this thread, or null if
/// the last call succeeded. Owned by the library.
#[no_mangle]
pub extern "C" fn spanclf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Create the built-in 14-class manifest.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn spanclf_manifest_default(out: *mut *mut SpanclfManifest) -> SpanclfStatus {
    guard(|| {
        if out.is_null() {
            return fail(SpanclfStatus::NullPointer, "out is null");
        }
        *out = manifest_handle(Manifest::default_set());
        SpanclfStatus::Ok
    })
}

/// Load a manifest from a JSON file of `{raw_name, canonical_name}` entries.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spanclf_manifest_load(path: *const c_char, out: *mut *mut SpanclfManifest) -> SpanclfStatus {
    guard(|| {
        if out.is_null() {
            return fail(SpanclfStatus::NullPointer, "out is null");
        }
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match Manifest::load(Path::new(path)) {
            Ok(m) => {
                *out = manifest_handle(m);
                SpanclfStatus::Ok
            }
            Err(e) => fail(corpus_status(&e), e.to_string()),
        }
    })
}

/// Number of classes in the manifest, or 0 for a null handle.
///
/// # Safety
/// `manifest` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn spanclf_manifest_num_classes(manifest: *const SpanclfManifest) -> usize {
    manifest.as_ref().map_or(0, |m| m.inner.len())
}

/// Canonical name of class `index`, or null when out of range. The string
/// lives as long as the manifest handle.
///
/// # Safety
/// `manifest` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn spanclf_manifest_class_name(manifest: *const SpanclfManifest, index: usize) -> *const c_char {
    manifest
        .as_ref()
        .and_then(|m| m.names.get(index))
        .map_or(ptr::null(), |c| c.as_ptr())
}

/// Release a manifest. Null is ignored.
///
/// # Safety
/// `manifest` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spanclf_manifest_free(manifest: *mut SpanclfManifest) {
    if !manifest.is_null() {
        drop(Box::from_raw(manifest));
    }
}

/// Load a saved model, checking that it was trained with `manifest`.
///
/// # Safety
/// `path` must be a NUL-terminated string, `manifest` a live handle and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spanclf_model_load(
    path: *const c_char,
    manifest: *const SpanclfManifest,
    out: *mut *mut SpanclfModel,
) -> SpanclfStatus {
    guard(|| {
        if out.is_null() {
            return fail(SpanclfStatus::NullPointer, "out is null");
        }
        let Some(manifest) = manifest.as_ref() else {
            return fail(SpanclfStatus::NullPointer, "manifest is null");
        };
        let path = match str_arg(path, "path") {
            Ok(p) => p,
            Err(s) => return s,
        };
        match read_model(Path::new(path), &manifest.inner) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(SpanclfModel { inner }));
                SpanclfStatus::Ok
            }
            Err(e) => fail(model_status(&e), e.to_string()),
        }
    })
}

/// Number of classes the model scores, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn spanclf_model_num_classes(model: *const SpanclfModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.num_classes())
}

/// Hashed feature dimension of the model, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a handle from this library.
#[no_mangle]
pub unsafe extern "C" fn spanclf_model_dim(model: *const SpanclfModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.dim())
}

unsafe fn model_input<'a>(
    model: *const SpanclfModel,
    text: *const c_char,
) -> Result<(&'a LinearModel, FeatureVector), SpanclfStatus> {
    let Some(model) = model.as_ref() else {
        return Err(fail(SpanclfStatus::NullPointer, "model is null"));
    };
    let text = str_arg(text, "text")?;
    let x = featurize(&tokenize(text), model.inner.dim())
        .map_err(|e| fail(SpanclfStatus::InvalidArgument, e.to_string()))?;
    Ok((&model.inner, x))
}

/// Class probabilities for `text`. `out` must hold at least
/// `spanclf_model_num_classes(model)` values.
///
/// # Safety
/// `model` must be a live handle, `text` a NUL-terminated string and
/// `out` valid for `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn spanclf_model_predict_proba(
    model: *const SpanclfModel,
    text: *const c_char,
    out: *mut f64,
    out_len: usize,
) -> SpanclfStatus {
    guard(|| {
        if out.is_null() {
            return fail(SpanclfStatus::NullPointer, "out is null");
        }
        let (model, x) = match model_input(model, text) {
            Ok(v) => v,
            Err(s) => return s,
        };
        let p = match model.predict_proba(&x) {
            Ok(p) => p,
            Err(e) => return fail(model_status(&e), e.to_string()),
        };
        if out_len < p.len() {
            return fail(
                SpanclfStatus::BufferTooSmall,
                format!("need room for {} probabilities, got {out_len}", p.len()),
            );
        }
        std::slice::from_raw_parts_mut(out, p.len()).copy_from_slice(&p);
        SpanclfStatus::Ok
    })
}

/// Most probable class index for `text`; ties go to the lowest index.
///
/// # Safety
/// `model` must be a live handle, `text` a NUL-terminated string and
/// `out_class` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn spanclf_model_predict(
    model: *const SpanclfModel,
    text: *const c_char,
    out_class: *mut usize,
) -> SpanclfStatus {
    guard(|| {
        if out_class.is_null() {
            return fail(SpanclfStatus::NullPointer, "out_class is null");
        }
        let (model, x) = match model_input(model, text) {
            Ok(v) => v,
            Err(s) => return s,
        };
        match model.predict(&x) {
            Ok(c) => {
                *out_class = c;
                SpanclfStatus::Ok
            }
            Err(e) => fail(model_status(&e), e.to_string()),
        }
    })
}

/// Release a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn spanclf_model_free(model: *mut SpanclfModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Inverse-frequency class weights normalised to sum to one. Every count
/// must be positive.
///
/// # Safety
/// `counts` must be valid for `len` reads and `out` for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn spanclf_class_weights(counts: *const u64, len: usize, out: *mut f64) -> SpanclfStatus {
    guard(|| {
        if counts.is_null() || out.is_null() {
            return fail(SpanclfStatus::NullPointer, "counts or out is null");
        }
        let counts = std::slice::from_raw_parts(counts, len);
        match class_weights_from_counts(counts) {
            Ok(w) => {
                std::slice::from_raw_parts_mut(out, len).copy_from_slice(w.weights());
                SpanclfStatus::Ok
            }
            Err(e) => fail(SpanclfStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Widen `[start, end)` (character offsets into `text`) to the enclosing
/// sentence or sub-sentence.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out_start` and `out_end` must
/// be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn spanclf_expand_span(
    text: *const c_char,
    start: usize,
    end: usize,
    mode: SpanclfContextMode,
    out_start: *mut usize,
    out_end: *mut usize,
) -> SpanclfStatus {
    guard(|| {
        if out_start.is_null() || out_end.is_null() {
            return fail(SpanclfStatus::NullPointer, "out_start or out_end is null");
        }
        let text = match str_arg(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match expand_span(text, start, end, mode.into()) {
            Ok((s, e)) => {
                *out_start = s;
                *out_end = e;
                SpanclfStatus::Ok
            }
            Err(e) => fail(SpanclfStatus::InvalidArgument, e.to_string()),
        }
    })
}
