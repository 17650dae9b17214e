//! C ABI over the `jiggle` crate.
//!
//! Complexes cross the boundary as opaque [`JgComplex`] handles; inputs
//! and structured outputs are JSON strings. Every fallible function
//! returns a [`JgStatus`] and on failure stores a message retrievable with
//! [`jg_last_error_message`] on the same thread. Strings returned through
//! out parameters are owned by the caller and released with
//! [`jg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use jiggle::complex::shape::{lambda, rmax, rmin};
use jiggle::complex::{greedy_color, SimplicialComplex};
use jiggle::jiggling::{jiggle_triangulation, JigglingConfig};
use jiggle::relations::Distribution;
use jiggle::subdivision::crystalline_subdivide;
use jiggle::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidInput = 4,
    /// The computation ran but its result could not be certified.
    Verification = 5,
    Panic = 6,
}

/// An embedded simplicial complex.
pub struct JgComplex {
    inner: SimplicialComplex,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> JgStatus {
    match e {
        Error::Json(_) => JgStatus::Parse,
        Error::Verification(_)
        | Error::SweepExhausted { .. }
        | Error::RetriesExhausted { .. }
        | Error::LevelLimit(_)
        | Error::LevelTooLow { .. }
        | Error::InsufficientMargin(_)
        | Error::CoverTooCoarse(_) => JgStatus::Verification,
        _ => JgStatus::InvalidInput,
    }
}

struct Failure(JgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> JgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            JgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            JgStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(JgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(JgStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn complex_arg<'a>(k: *const JgComplex) -> Result<&'a SimplicialComplex, Failure> {
    k.as_ref().map(|c| &c.inner).ok_or_else(|| null("complex"))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

fn boxed(inner: SimplicialComplex) -> *mut JgComplex {
    Box::into_raw(Box::new(JgComplex { inner }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, empty after a success.
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn jg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a complex from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jg_complex_from_json(json: *const c_char, out: *mut *mut JgComplex) -> JgStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let k = SimplicialComplex::from_json(text)?;
        write_out(out, boxed(k), "out")
    })
}

/// Releases a complex; null is ignored.
///
/// # Safety
/// `k` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jg_complex_free(k: *mut JgComplex) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Crystalline subdivision of level `level` as a new complex.
///
/// # Safety
/// `k` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jg_complex_subdivide(k: *const JgComplex, level: u32, out: *mut *mut JgComplex) -> JgStatus {
    guard(|| {
        let s = crystalline_subdivide(complex_arg(k)?, level)?;
        write_out(out, boxed(s), "out")
    })
}

/// Number of vertices, 0 for a null handle.
///
/// # Safety
/// `k` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jg_complex_num_vertices(k: *const JgComplex) -> usize {
    k.as_ref().map_or(0, |c| c.inner.num_vertices())
}

/// Number of top dimensional simplices, 0 for a null handle.
///
/// # Safety
/// `k` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jg_complex_num_top_simplices(k: *const JgComplex) -> usize {
    k.as_ref().map_or(0, |c| c.inner.top().len())
}

/// JSON form of a complex, to be released with [`jg_string_free`].
///
/// # Safety
/// `k` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn jg_complex_to_json(k: *const JgComplex, out: *mut *mut c_char) -> JgStatus {
    guard(|| {
        let text = complex_arg(k)?.to_json();
        write_out(out, into_c_string(text), "out")
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Largest `rmax`, smallest `rmin` and largest `Λ` over the top simplices.
///
/// # Safety
/// `k` must be a live handle and the out pointers valid.
#[no_mangle]
pub unsafe extern "C" fn jg_complex_metrics(
    k: *const JgComplex,
    out_rmax: *mut f64,
    out_rmin: *mut f64,
    out_lambda: *mut f64,
) -> JgStatus {
    guard(|| {
        let k = complex_arg(k)?;
        let (mut hi, mut lo, mut lam) = (0.0f64, f64::INFINITY, 0.0f64);
        for s in k.top() {
            let p = k.points(s);
            hi = hi.max(rmax(&p));
            lo = lo.min(rmin(&p)?);
            lam = lam.max(lambda(&p)?);
        }
        write_out(out_rmax, hi, "out_rmax")?;
        write_out(out_rmin, lo, "out_rmin")?;
        write_out(out_lambda, lam, "out_lambda")
    })
}

/// Greedy coloring of the top simplices. Writes the number of colors and,
/// when `colors` is non-null, one color per top simplex into `colors`,
/// which must hold [`jg_complex_num_top_simplices`] entries.
///
/// # Safety
/// `k` must be a live handle, `num_colors` valid, `colors` null or large
/// enough.
#[no_mangle]
pub unsafe extern "C" fn jg_complex_color(k: *const JgComplex, num_colors: *mut usize, colors: *mut usize) -> JgStatus {
    guard(|| {
        let c = greedy_color(complex_arg(k)?)?;
        write_out(num_colors, c.num_colors, "num_colors")?;
        if !colors.is_null() {
            std::slice::from_raw_parts_mut(colors, c.colors.len()).copy_from_slice(&c.colors);
        }
        Ok(())
    })
}

/// Moves a top dimensional triangulation into general position with
/// respect to the distribution given as JSON, within `epsilon`. Returns
/// the moved complex and, when `report` is non-null, a JSON report.
///
/// # Safety
/// `k` must be a live handle, `xi_json` a NUL-terminated string, `out`
/// valid and `report` null or valid.
#[no_mangle]
pub unsafe extern "C" fn jg_jiggle_triangulation(
    k: *const JgComplex,
    xi_json: *const c_char,
    epsilon: f64,
    out: *mut *mut JgComplex,
    report: *mut *mut c_char,
) -> JgStatus {
    guard(|| {
        let k = complex_arg(k)?;
        let xi: Distribution = serde_json::from_str(str_arg(xi_json, "xi_json")?)
            .map_err(|e| Failure(JgStatus::Parse, format!("xi_json: {e}")))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let mut cfg = JigglingConfig::new(epsilon);
        cfg.l_xi = xi.lipschitz();
        let res = jiggle_triangulation(k, &xi, &cfg)?;
        if !report.is_null() {
            let text = serde_json::json!({
                "jiggling": res.report,
                "flips": res.flips,
                "general_position": res.general_position,
            })
            .to_string();
            report.write(into_c_string(text));
        }
        out.write(boxed(res.complex));
        Ok(())
    })
}
