//! C ABI for the semipos library.
//!
//! Matrices, cones and linear maps cross the boundary as opaque handles
//! created by `*_parse` or constructor functions and released with the
//! matching `*_free`. Every fallible call returns a [`SemiposStatus`]; on
//! anything other than `SEMIPOS_STATUS_OK` the message is available from
//! [`semipos_last_error`] on the same thread. Strings returned by the
//! library are owned by the caller and released with [`semipos_string_free`].
//!
//! Null cone pointers stand for the nonnegative orthant of the right size.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use semipos::preservers::{self, FactorKind, FalsifyOutcome, LinearMap};
use semipos::{Error, MspVerdict, PolyCone, RMatrix, SpVerdict};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiposStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    DimensionMismatch = 4,
    Singular = 5,
    Capacity = 6,
    NotProper = 7,
    Hypothesis = 8,
    InvalidInput = 9,
    Verification = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiposSpKind {
    Semipositive = 0,
    NotSemipositive = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiposMspKind {
    Minimal = 0,
    Redundant = 1,
    NotSemipositive = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiposFactorKind {
    None = 0,
    Standard = 1,
    Transposed = 2,
}

/// Opaque exact rational matrix.
pub struct SemiposMatrix(RMatrix);

/// Opaque polyhedral cone.
pub struct SemiposCone(PolyCone);

/// Opaque linear map on matrices.
pub struct SemiposMap(LinearMap);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> SemiposStatus {
    match err {
        Error::Parse { .. } => SemiposStatus::Parse,
        Error::DimensionMismatch(_) => SemiposStatus::DimensionMismatch,
        Error::Singular => SemiposStatus::Singular,
        Error::Capacity(_) => SemiposStatus::Capacity,
        Error::NotProper(_) => SemiposStatus::NotProper,
        Error::Hypothesis(_) => SemiposStatus::Hypothesis,
        Error::InvalidInput(_) => SemiposStatus::InvalidInput,
        Error::Verification(_) => SemiposStatus::Verification,
    }
}

struct Fail(SemiposStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> SemiposStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SemiposStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SemiposStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(SemiposStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(SemiposStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(SemiposStatus::NullPointer, format!("null {what}")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(SemiposStatus::NullPointer, format!("null output {what}")))
}

unsafe fn cone_or_orthant(p: *const SemiposCone, dim: usize) -> PolyCone {
    match p.as_ref() {
        Some(k) => k.0.clone(),
        None => PolyCone::orthant(dim),
    }
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

fn vector_text(v: &[semipos::Rational]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn semipos_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn semipos_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn semipos_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses the matrix text format (rows of `p` or `p/q` entries).
///
/// # Safety
/// `text_ptr` must be a NUL-terminated string and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn semipos_matrix_parse(text_ptr: *const c_char, result: *mut *mut SemiposMatrix) -> SemiposStatus {
    guard(|| {
        let slot = out(result, "matrix")?;
        *slot = boxed(SemiposMatrix(RMatrix::parse(text(text_ptr)?)?));
        Ok(())
    })
}

/// # Safety
/// `m` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn semipos_matrix_free(m: *mut SemiposMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// `m` must be a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn semipos_matrix_rows(m: *const SemiposMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.rows())
}

/// # Safety
/// `m` must be a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn semipos_matrix_cols(m: *const SemiposMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.cols())
}

/// Renders the matrix in the text format; free with `semipos_string_free`.
///
/// # Safety
/// `m` must be a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn semipos_matrix_to_text(m: *const SemiposMatrix) -> *mut c_char {
    m.as_ref().map_or(ptr::null_mut(), |m| c_string(m.0.to_string()))
}

/// Parses the cone text format (`dim n` header, one generator per line).
///
/// # Safety
/// `text_ptr` must be a NUL-terminated string and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn semipos_cone_parse(text_ptr: *const c_char, result: *mut *mut SemiposCone) -> SemiposStatus {
    guard(|| {
        let slot = out(result, "cone")?;
        *slot = boxed(SemiposCone(PolyCone::parse(text(text_ptr)?)?));
        Ok(())
    })
}

/// The nonnegative orthant of `R^dim`, or null when `dim` is zero.
#[no_mangle]
pub extern "C" fn semipos_cone_orthant(dim: usize) -> *mut SemiposCone {
    if dim == 0 {
        return ptr::null_mut();
    }
    boxed(SemiposCone(PolyCone::orthant(dim)))
}

/// # Safety
/// `k` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn semipos_cone_free(k: *mut SemiposCone) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// # Safety
/// `k` must be a live cone handle.
#[no_mangle]
pub unsafe extern "C" fn semipos_cone_dim(k: *const SemiposCone) -> usize {
    k.as_ref().map_or(0, |k| k.0.dim())
}

/// Parses the linear-map text format (`shape m n` header, then the
/// `mn×mn` matrix acting on column-stacked vectors).
///
/// # Safety
/// `text_ptr` must be a NUL-terminated string and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn semipos_map_parse(text_ptr: *const c_char, result: *mut *mut SemiposMap) -> SemiposStatus {
    guard(|| {
        let slot = out(result, "map")?;
        *slot = boxed(SemiposMap(LinearMap::parse(text(text_ptr)?)?));
        Ok(())
    })
}

/// The map `A ↦ X·A·Y`.
///
/// # Safety
/// `x`, `y` must be live matrix handles and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn semipos_map_from_xay(
    x: *const SemiposMatrix,
    y: *const SemiposMatrix,
    result: *mut *mut SemiposMap,
) -> SemiposStatus {
    guard(|| {
        let (x, y) = (handle(x, "X")?, handle(y, "Y")?);
        let slot = out(result, "map")?;
        *slot = boxed(SemiposMap(LinearMap::from_xay(&x.0, &y.0)?));
        Ok(())
    })
}

/// # Safety
/// `l` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn semipos_map_free(l: *mut SemiposMap) {
    if !l.is_null() {
        drop(Box::from_raw(l));
    }
}

/// Applies the map to a matrix.
///
/// # Safety
/// `l`, `a` must be live handles and `result` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn semipos_map_apply(
    l: *const SemiposMap,
    a: *const SemiposMatrix,
    result: *mut *mut SemiposMatrix,
) -> SemiposStatus {
    guard(|| {
        let (l, a) = (handle(l, "map")?, handle(a, "matrix")?);
        let slot = out(result, "matrix")?;
        *slot = boxed(SemiposMatrix(l.0.apply(&a.0)?));
        Ok(())
    })
}

/// Decides semipositivity of `a` over `(k1, k2)`. `vector` receives the
/// witness or the Farkas certificate as space-separated rationals.
///
/// # Safety
/// `a` must be a live matrix handle, cones live handles or null, and the
/// outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn semipos_classify_sp(
    a: *const SemiposMatrix,
    k1: *const SemiposCone,
    k2: *const SemiposCone,
    kind: *mut SemiposSpKind,
    vector: *mut *mut c_char,
) -> SemiposStatus {
    guard(|| {
        let a = &handle(a, "matrix")?.0;
        let (kind, vector) = (out(kind, "kind")?, out(vector, "vector")?);
        let (k1, k2) = (cone_or_orthant(k1, a.cols()), cone_or_orthant(k2, a.rows()));
        match semipos::classify_sp(a, &k1, &k2)? {
            SpVerdict::Semipositive { witness } => {
                *kind = SemiposSpKind::Semipositive;
                *vector = c_string(vector_text(&witness));
            }
            SpVerdict::NotSemipositive { certificate } => {
                *kind = SemiposSpKind::NotSemipositive;
                *vector = c_string(vector_text(&certificate));
            }
        }
        Ok(())
    })
}

/// Decides minimal semipositivity. `evidence` receives the left inverse as
/// matrix text for `Minimal`, else the witness or certificate vector.
///
/// # Safety
/// As for `semipos_classify_sp`.
#[no_mangle]
pub unsafe extern "C" fn semipos_classify_msp(
    a: *const SemiposMatrix,
    k1: *const SemiposCone,
    k2: *const SemiposCone,
    kind: *mut SemiposMspKind,
    evidence: *mut *mut c_char,
) -> SemiposStatus {
    guard(|| {
        let a = &handle(a, "matrix")?.0;
        let (kind, evidence) = (out(kind, "kind")?, out(evidence, "evidence")?);
        let (k1, k2) = (cone_or_orthant(k1, a.cols()), cone_or_orthant(k2, a.rows()));
        let (k, text) = match semipos::classify_msp(a, &k1, &k2)? {
            MspVerdict::Minimal { left_inverse } => (SemiposMspKind::Minimal, left_inverse.to_string()),
            MspVerdict::Redundant { witness } => (SemiposMspKind::Redundant, vector_text(&witness)),
            MspVerdict::NotSemipositive { certificate } => (SemiposMspKind::NotSemipositive, vector_text(&certificate)),
        };
        *kind = k;
        *evidence = c_string(text);
        Ok(())
    })
}

/// Factors the map as `A ↦ sign·X·A·Y` or `A ↦ sign·X·Aᵀ·Y`. When no
/// factorization exists `kind` is `NONE` and the other outputs are untouched.
///
/// # Safety
/// `l` must be a live map handle and the outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn semipos_map_factor(
    l: *const SemiposMap,
    kind: *mut SemiposFactorKind,
    x: *mut *mut SemiposMatrix,
    y: *mut *mut SemiposMatrix,
    sign: *mut i32,
) -> SemiposStatus {
    guard(|| {
        let l = &handle(l, "map")?.0;
        let kind = out(kind, "kind")?;
        let (x, y, sign) = (out(x, "X")?, out(y, "Y")?, out(sign, "sign")?);
        match preservers::factor_map(l) {
            None => *kind = SemiposFactorKind::None,
            Some(f) => {
                *kind = match f.kind {
                    FactorKind::Standard => SemiposFactorKind::Standard,
                    FactorKind::Transposed => SemiposFactorKind::Transposed,
                };
                *x = boxed(SemiposMatrix(f.factors.x));
                *y = boxed(SemiposMatrix(f.factors.y));
                *sign = i32::from(f.factors.sign);
            }
        }
        Ok(())
    })
}

/// Searches `trials` seeded samples for a semipositive `A` whose image is
/// not semipositive. On success `found` is set and `counterexample`
/// receives `A` (its index in `trial`); otherwise `counterexample` is null.
///
/// # Safety
/// `l` must be a live map handle, cones live or null, outputs valid.
#[no_mangle]
pub unsafe extern "C" fn semipos_falsify(
    l: *const SemiposMap,
    k1: *const SemiposCone,
    k2: *const SemiposCone,
    trials: u64,
    seed: u64,
    found: *mut bool,
    trial: *mut u64,
    counterexample: *mut *mut SemiposMatrix,
) -> SemiposStatus {
    guard(|| {
        let l = &handle(l, "map")?.0;
        let (found, trial, ce) = (out(found, "found")?, out(trial, "trial")?, out(counterexample, "matrix")?);
        let (k1, k2) = (cone_or_orthant(k1, l.n()), cone_or_orthant(k2, l.m()));
        match preservers::falsify_preserver(l, &k1, &k2, trials, seed)? {
            FalsifyOutcome::NoCounterexampleFound { trials } => {
                *found = false;
                *trial = trials;
                *ce = ptr::null_mut();
            }
            FalsifyOutcome::Counterexample(c) => {
                *found = true;
                *trial = c.trial;
                *ce = boxed(SemiposMatrix(c.a));
            }
        }
        Ok(())
    })
}

/// Runs the full preserver analysis and returns the report as JSON, in the
/// same shape the command-line tool prints.
///
/// # Safety
/// `l` must be a live map handle, cones live or null, `report` valid.
#[no_mangle]
pub unsafe extern "C" fn semipos_analyze(
    l: *const SemiposMap,
    k1: *const SemiposCone,
    k2: *const SemiposCone,
    trials: u64,
    seed: u64,
    report: *mut *mut c_char,
) -> SemiposStatus {
    guard(|| {
        let l = &handle(l, "map")?.0;
        let report = out(report, "report")?;
        let (k1, k2) = (cone_or_orthant(k1, l.n()), cone_or_orthant(k2, l.m()));
        let budget = preservers::AnalysisBudget { trials, seed, ..Default::default() };
        let r = preservers::analyze_preserver(l, &k1, &k2, budget)?;
        let doc = semipos::cli::report_json(&r, seed);
        *report = c_string(serde_json::to_string_pretty(&doc).expect("JSON value serializes"));
        Ok(())
    })
}
