//! C interface. Every function returns a [`TautStatus`]; results come back
//! through out-pointers as opaque handles or library-allocated strings.
//! After a failure, `taut_last_error` describes it on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use taut_core::pixton::OmegaEngine;
use taut_core::relations::{dr_relation_coefficient, Eliminator, Monomial, RelationDb};
use taut_core::strata::{TautClass, TautClassJson};
use taut_core::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TautStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Parse = 3,
    BelowThreshold = 4,
    Interpolation = 5,
    Elimination = 6,
    Integrity = 7,
    Defect = 8,
    Io = 9,
    Panic = 10,
}

/// A tautological class with rational coefficients.
pub struct TautClassHandle(TautClass);

/// A boundary-expression engine with its caches and optional database.
pub struct TautEliminator(Eliminator);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(e: &Error) -> TautStatus {
    match e {
        Error::InvalidInput(_) | Error::InvalidGraph(_) | Error::MixedAmbient(..) => TautStatus::InvalidInput,
        Error::Parse(_) | Error::Json(_) => TautStatus::Parse,
        Error::BelowThreshold { .. } => TautStatus::BelowThreshold,
        Error::Interpolation(_) => TautStatus::Interpolation,
        Error::Elimination(_) => TautStatus::Elimination,
        Error::Integrity(_) => TautStatus::Integrity,
        Error::Defect(_) => TautStatus::Defect,
        Error::Io(_) => TautStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Core(Error),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TautStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            TautStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            TautStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_error("string argument is not valid UTF-8");
            TautStatus::Parse
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            TautStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Utf8)
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn class<'a>(p: *const TautClassHandle) -> Result<&'a TautClass, Failure> {
    p.as_ref().map(|h| &h.0).ok_or(Failure::Null("class"))
}

unsafe fn put_class(out: *mut *mut TautClassHandle, c: TautClass) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(TautClassHandle(c)));
    Ok(())
}

/// Description of the last failure on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn taut_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn taut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `c` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn taut_class_free(c: *mut TautClassHandle) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// The monomial given as text (e.g. `psi1^2*kappa1`) on M̄_{g,n}.
///
/// # Safety
/// `monomial` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn taut_class_monomial(
    g: u32,
    n: u32,
    monomial: *const c_char,
    out: *mut *mut TautClassHandle,
) -> TautStatus {
    guard(|| {
        let m = Monomial::parse(text(monomial, "monomial")?, n)?;
        put_class(out, m.class(g)?)
    })
}

/// Reads a class from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn taut_class_from_json(json: *const c_char, out: *mut *mut TautClassHandle) -> TautStatus {
    guard(|| {
        let j: TautClassJson = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        put_class(out, TautClass::from_json(&j)?)
    })
}

/// Writes the JSON form of `c`; free the result with `taut_string_free`.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn taut_class_to_json(c: *const TautClassHandle, out: *mut *mut c_char) -> TautStatus {
    guard(|| {
        let c = class(c)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let s = serde_json::to_string(&c.to_json()).map_err(Error::from)?;
        *out = CString::new(s).map_err(|_| Failure::Utf8)?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn taut_class_num_terms(c: *const TautClassHandle, out: *mut usize) -> TautStatus {
    guard(|| {
        let c = class(c)?;
        let out = out.as_mut().ok_or(Failure::Null("out"))?;
        *out = c.len();
        Ok(())
    })
}

/// Sets `*out` to whether the two classes are equal term by term.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn taut_class_equal(
    a: *const TautClassHandle,
    b: *const TautClassHandle,
    out: *mut bool,
) -> TautStatus {
    guard(|| {
        let (a, b) = (class(a)?, class(b)?);
        *out.as_mut().ok_or(Failure::Null("out"))? = a == b;
        Ok(())
    })
}

/// Pixton's class Ω_{g,A} through `max_degree`; `r_samples` = 0 picks the
/// sample count from the degree bound.
///
/// # Safety
/// `a` must point to `n` integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn taut_omega(
    g: u32,
    a: *const i64,
    n: usize,
    max_degree: u32,
    r_samples: usize,
    out: *mut *mut TautClassHandle,
) -> TautStatus {
    guard(|| {
        let a = slice(a, n, "a")?;
        let engine = OmegaEngine::new(g, n as u32, max_degree)?;
        let samples = (r_samples > 0).then_some(r_samples);
        put_class(out, engine.constant_term_with(a, samples)?)
    })
}

/// The a-monomial coefficient of the DR relation on M̄_{g,N} (N =
/// `legs`), multiplied by the ψ-monomial `multiplier` and pushed forward
/// along the map forgetting `forget`.
///
/// # Safety
/// `m` must hold `legs - 1` exponents, `multiplier` `legs` exponents and
/// `forget` `forget_len` labels; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn taut_dr_relation(
    g: u32,
    legs: usize,
    m: *const u32,
    multiplier: *const u32,
    forget: *const u32,
    forget_len: usize,
    out: *mut *mut TautClassHandle,
) -> TautStatus {
    guard(|| {
        if legs < 2 {
            return Err(Error::InvalidInput("at least two markings are required".into()).into());
        }
        let m = slice(m, legs - 1, "m")?;
        let multiplier = slice(multiplier, legs, "multiplier")?;
        let forget = slice(forget, forget_len, "forget")?;
        put_class(out, dr_relation_coefficient(g, m, multiplier, forget)?)
    })
}

/// A new engine; `db_path` may be null for no database.
///
/// # Safety
/// `db_path` must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn taut_eliminator_new(db_path: *const c_char, out: *mut *mut TautEliminator) -> TautStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let mut e = Eliminator::new();
        if !db_path.is_null() {
            e = e.with_db(RelationDb::open(text(db_path, "db_path")?)?);
        }
        *out = Box::into_raw(Box::new(TautEliminator(e)));
        Ok(())
    })
}

/// # Safety
/// `e` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn taut_eliminator_free(e: *mut TautEliminator) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// A boundary expression for the monomial on M̄_{g,n}.
///
/// # Safety
/// `e` must be a live engine, `monomial` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn taut_boundary_expression(
    e: *mut TautEliminator,
    g: u32,
    n: u32,
    monomial: *const c_char,
    out: *mut *mut TautClassHandle,
) -> TautStatus {
    guard(|| {
        let e = e.as_mut().ok_or(Failure::Null("eliminator"))?;
        let m = Monomial::parse(text(monomial, "monomial")?, n)?;
        let x = e.0.boundary_expression(g, &m)?;
        put_class(out, x.value)
    })
}

/// Rewrites `c` until every stratum has property ⋆.
///
/// # Safety
/// `e` and `c` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn taut_theorem_star_reduce(
    e: *mut TautEliminator,
    c: *const TautClassHandle,
    out: *mut *mut TautClassHandle,
) -> TautStatus {
    guard(|| {
        let e = e.as_mut().ok_or(Failure::Null("eliminator"))?;
        let r = e.0.theorem_star_reduce(class(c)?)?;
        put_class(out, r)
    })
}
