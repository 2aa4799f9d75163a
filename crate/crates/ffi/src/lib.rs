//! C ABI for `ratinglab`.
//!
//! Systems are opaque handles created by `rl_system_builtin` or
//! `rl_system_from_json` and released with `rl_system_free`. Every fallible
//! function returns an [`RlStatus`]; on failure `rl_last_error` describes the
//! problem for the calling thread. Outputs are written only on success.
//! Panics never cross the boundary; they surface as `RL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ratinglab::verifier::{
    build_skill_chain, find_max_gain_opponent, run_property, ChainOptions, CheckOptions, Grid,
    MaxGain, Property, PropertyReport, Verdict,
};
use ratinglab::{Error, GainQuery, RatingSystem};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Config = 4,
    OffGrid = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlVerdict {
    Holds = 0,
    Refuted = 1,
    Inconclusive = 2,
}

impl From<Verdict> for RlVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Holds => RlVerdict::Holds,
            Verdict::Refuted => RlVerdict::Refuted,
            Verdict::Inconclusive => RlVerdict::Inconclusive,
        }
    }
}

/// Opaque rating system handle.
pub struct RlSystem {
    inner: RatingSystem,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(RlStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::OffGrid { .. } => RlStatus::OffGrid,
            Error::InvalidArgument(_) => RlStatus::InvalidArgument,
            Error::Io(_) => RlStatus::Io,
            Error::InvalidCurve(_)
            | Error::InvalidK(_)
            | Error::Config(_)
            | Error::Json(_)
            | Error::Csv(_) => RlStatus::Config,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn set_error(msg: Option<String>) {
    let msg = msg.map(|m| CString::new(m.replace('\0', " ")).expect("no interior nul"));
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> RlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(None);
            RlStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(Some(format!("panic: {msg}")));
            RlStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(RlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(RlStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn system<'a>(p: *const RlSystem) -> FfiResult<&'a RatingSystem> {
    p.as_ref().map(|s| &s.inner).ok_or_else(|| null("system"))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn check_out<T>(out: *mut T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        Err(null(what))
    } else {
        Ok(())
    }
}

fn boxed(sys: RatingSystem) -> *mut RlSystem {
    Box::into_raw(Box::new(RlSystem { inner: sys }))
}

/// Message for the last failed call on this thread, or null after a
/// successful call. Valid until the next `rl_*` call on the same thread.
#[no_mangle]
pub extern "C" fn rl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn rl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates one of the built-in systems (`"sonas"`, `"logistic-unclamped"`, ...).
///
/// # Safety
/// `name` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_system_builtin(
    name: *const c_char,
    out: *mut *mut RlSystem,
) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let sys = ratinglab::builtin::by_name(text(name, "name")?)?;
        put(out, boxed(sys), "out")
    })
}

/// Creates a system from a JSON system document.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_system_from_json(
    json: *const c_char,
    out: *mut *mut RlSystem,
) -> RlStatus {
    guard(|| {
        check_out(out, "out")?;
        let cfg = ratinglab::config::SystemConfig::from_json(text(json, "json")?)?;
        put(out, boxed(cfg.build()?), "out")
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sys` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rl_system_free(sys: *mut RlSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Probability that true rating `x` beats true rating `y`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_sigma(sys: *const RlSystem, x: f64, y: f64, out: *mut f64) -> RlStatus {
    guard(|| put(out, system(sys)?.sigma(x, y)?, "out"))
}

/// Total stake `K(x, y)` of a match.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_k(sys: *const RlSystem, x: f64, y: f64, out: *mut f64) -> RlStatus {
    guard(|| put(out, system(sys)?.k(x, y), "out"))
}

/// Points a winner rated `winner` takes from a loser rated `loser`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_adjustment(
    sys: *const RlSystem,
    winner: f64,
    loser: f64,
    out: *mut f64,
) -> RlStatus {
    guard(|| put(out, system(sys)?.adjustment(winner, loser)?, "out"))
}

/// Expected rating change of a player rated `x` (true `x_star`) against an
/// opponent rated `y` (true `y_star`).
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_expected_gain(
    sys: *const RlSystem,
    x: f64,
    x_star: f64,
    y: f64,
    y_star: f64,
    out: *mut f64,
) -> RlStatus {
    guard(|| {
        let g = system(sys)?.expected_gain(&GainQuery::new(x, x_star, y, y_star))?;
        put(out, g, "out")
    })
}

/// Ratings of both players after `winner` beats `loser`.
///
/// # Safety
/// `sys` must be a live handle; both outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_apply_match(
    sys: *const RlSystem,
    winner: f64,
    loser: f64,
    winner_out: *mut f64,
    loser_out: *mut f64,
) -> RlStatus {
    guard(|| {
        check_out(winner_out, "winner_out")?;
        check_out(loser_out, "loser_out")?;
        let (w, l) = system(sys)?.apply_match(winner, loser)?;
        put(winner_out, w, "winner_out")?;
        put(loser_out, l, "loser_out")
    })
}

unsafe fn verify_report(
    sys: *const RlSystem,
    property: *const c_char,
    p: f64,
    lo: f64,
    hi: f64,
    step: f64,
) -> FfiResult<PropertyReport> {
    let sys = system(sys)?;
    let prop: Property = text(property, "property")?.parse()?;
    let grid = Grid::new(lo, hi, step)?;
    let opts = CheckOptions::for_curve(sys.curve());
    let p = (!p.is_nan()).then_some(p);
    Ok(run_property(sys, prop, p, &grid, &opts, 0.9, 50)?)
}

/// Checks a property (by name, e.g. `"p_oi"`) on the grid `lo..=hi` at
/// `step`. Pass NaN for `p` when the property takes no margin.
///
/// # Safety
/// `sys` must be a live handle; `property` a nul-terminated string; both
/// outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rl_verify(
    sys: *const RlSystem,
    property: *const c_char,
    p: f64,
    lo: f64,
    hi: f64,
    step: f64,
    verdict_out: *mut RlVerdict,
    residual_out: *mut f64,
) -> RlStatus {
    guard(|| {
        check_out(verdict_out, "verdict_out")?;
        check_out(residual_out, "residual_out")?;
        let r = verify_report(sys, property, p, lo, hi, step)?;
        put(verdict_out, r.verdict.into(), "verdict_out")?;
        put(residual_out, r.max_residual, "residual_out")
    })
}

/// Like `rl_verify`, returning the full report as a JSON string that the
/// caller releases with `rl_string_free`.
///
/// # Safety
/// As for `rl_verify`; `json_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_verify_json(
    sys: *const RlSystem,
    property: *const c_char,
    p: f64,
    lo: f64,
    hi: f64,
    step: f64,
    json_out: *mut *mut c_char,
) -> RlStatus {
    guard(|| {
        check_out(json_out, "json_out")?;
        let r = verify_report(sys, property, p, lo, hi, step)?;
        let json = serde_json::to_string(&r).map_err(Error::from)?;
        let s = CString::new(json).expect("JSON has no interior nul");
        put(json_out, s.into_raw(), "json_out")
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a skill chain with link probability `p` from `r1`, using at most
/// `budget` ratings none above `ceiling`. The chain length goes to `len_out`;
/// the ratings are copied to `ratings` when `capacity` is large enough and
/// `RL_STATUS_BUFFER_TOO_SMALL` is returned otherwise. `ratings` may be
/// null when `capacity` is zero, to query the length.
///
/// # Safety
/// `sys` must be a live handle; `ratings` must hold `capacity` doubles;
/// `len_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_chain(
    sys: *const RlSystem,
    p: f64,
    r1: f64,
    budget: usize,
    ceiling: f64,
    ratings: *mut f64,
    capacity: usize,
    len_out: *mut usize,
) -> RlStatus {
    guard(|| {
        check_out(len_out, "len_out")?;
        if ratings.is_null() && capacity > 0 {
            return Err(null("ratings"));
        }
        let chain = build_skill_chain(
            system(sys)?.curve(),
            p,
            r1,
            &ChainOptions::new(budget, ceiling),
        )?;
        put(len_out, chain.len(), "len_out")?;
        if chain.len() > capacity {
            return Err(Failure(
                RlStatus::BufferTooSmall,
                format!(
                    "chain has {} ratings but the buffer holds {capacity}",
                    chain.len()
                ),
            ));
        }
        ptr::copy_nonoverlapping(chain.ratings.as_ptr(), ratings, chain.len());
        Ok(())
    })
}

/// Searches `[lo, hi]` for the correctly rated opponent maximising the
/// magnitude of expected gain. When every opponent is equivalent within
/// `tolerance`, `indifferent_out` is set and `rating_out` is NaN.
///
/// # Safety
/// `sys` must be a live handle; all outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn rl_max_gain_opponent(
    sys: *const RlSystem,
    x: f64,
    x_star: f64,
    lo: f64,
    hi: f64,
    resolution: f64,
    tolerance: f64,
    rating_out: *mut f64,
    gain_out: *mut f64,
    indifferent_out: *mut bool,
) -> RlStatus {
    guard(|| {
        check_out(rating_out, "rating_out")?;
        check_out(gain_out, "gain_out")?;
        check_out(indifferent_out, "indifferent_out")?;
        let best =
            find_max_gain_opponent(system(sys)?, x, x_star, (lo, hi), resolution, tolerance)?;
        let (rating, gain, indifferent) = match best {
            MaxGain::Opponent { rating, gain } => (rating, gain, false),
            MaxGain::Indifferent { gain } => (f64::NAN, gain, true),
        };
        put(rating_out, rating, "rating_out")?;
        put(gain_out, gain, "gain_out")?;
        put(indifferent_out, indifferent, "indifferent_out")
    })
}
