//! C ABI over `tmpa-core`.
//!
//! Every fallible function returns a [`TmpaStatus`] and writes results through
//! out-pointers. On failure the message is kept per thread and can be read with
//! [`tmpa_last_error`]. Arrays and patterns are opaque handles that the caller
//! releases with the matching `_free` function. Panics never cross the boundary;
//! they surface as `TMPA_STATUS_PANIC`.
//!
//! Pointer contract: every pointer argument is either null, which is reported
//! as `TMPA_STATUS_NULL_POINTER` (or ignored where documented), or valid for
//! the access the function makes. Buffers hold at least the stated length, and
//! handles come from this library and have not been freed.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tmpa_core::array::{directivity, full_pattern, steering_delays, theta_grid};
use tmpa_core::harmonics::dynamic_excitation;
use tmpa_core::metrics::{design_delta, efficiencies, pl5};
use tmpa_core::timedomain::verify_array;
use tmpa_core::{ArrayConfig, Error, PatternResult, PulseSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmpaStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed argument: bad length, harmonic order, sample count.
    InvalidArgument = 2,
    /// Argument outside its physical domain: rise/fall time, angle, target.
    OutOfRange = 3,
    /// Caller buffer shorter than the result.
    BufferTooSmall = 4,
    /// A solver or series failed to converge.
    Numerical = 5,
    /// The requested closed form does not apply to this geometry.
    Unavailable = 6,
    Panic = 7,
}

impl From<&Error> for TmpaStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidDelta(_)
            | Error::SynthesisDomain(_)
            | Error::ScanAngle(_)
            | Error::TargetOutOfRange(_)
            | Error::InvalidRange(_) => TmpaStatus::OutOfRange,
            Error::ToleranceUnreachable { .. } | Error::Bracket(_) => TmpaStatus::Numerical,
            Error::ClosedFormUnavailable(_) => TmpaStatus::Unavailable,
            _ => TmpaStatus::InvalidArgument,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn fail(status: TmpaStatus, message: impl Into<String>) -> TmpaStatus {
    set_error(message.into());
    status
}

/// Runs `body` with error bookkeeping and panic containment.
fn guard(body: impl FnOnce() -> Result<(), TmpaStatus>) -> TmpaStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => TmpaStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(TmpaStatus::Panic, "internal panic"),
    }
}

fn check(e: Error) -> TmpaStatus {
    let status = TmpaStatus::from(&e);
    fail(status, e.to_string())
}

fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, TmpaStatus> {
    // SAFETY: the caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| fail(TmpaStatus::NullPointer, format!("{name} is null")))
}

fn input<'a, T>(p: *const T, name: &str) -> Result<&'a T, TmpaStatus> {
    // SAFETY: the caller passes either null or a pointer to a live object.
    unsafe { p.as_ref() }.ok_or_else(|| fail(TmpaStatus::NullPointer, format!("{name} is null")))
}

fn copy_out(src: &[f64], dst: *mut f64, len: usize) -> Result<(), TmpaStatus> {
    if dst.is_null() {
        return Err(fail(TmpaStatus::NullPointer, "output buffer is null"));
    }
    if len < src.len() {
        return Err(fail(TmpaStatus::BufferTooSmall, format!("need {} values, buffer holds {len}", src.len())));
    }
    // SAFETY: dst is non-null and the caller guarantees `len` writable values.
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len()) };
    Ok(())
}

fn pulse(delta_norm: f64) -> Result<PulseSpec, TmpaStatus> {
    PulseSpec::new(delta_norm).map_err(check)
}

/// Message of the last failure on this thread, or null. Valid until the next
/// call into this library from the same thread.
#[no_mangle]
pub extern "C" fn tmpa_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn tmpa_status_name(status: TmpaStatus) -> *const c_char {
    let name: &'static CStr = match status {
        TmpaStatus::Ok => c"ok",
        TmpaStatus::NullPointer => c"null_pointer",
        TmpaStatus::InvalidArgument => c"invalid_argument",
        TmpaStatus::OutOfRange => c"out_of_range",
        TmpaStatus::BufferTooSmall => c"buffer_too_small",
        TmpaStatus::Numerical => c"numerical",
        TmpaStatus::Unavailable => c"unavailable",
        TmpaStatus::Panic => c"panic",
    };
    name.as_ptr()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tmpa_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// 5th-harmonic level relative to the wanted harmonic, dB. `-INFINITY` when fully
/// suppressed.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_pl5(delta_norm: f64, out_db: *mut f64) -> TmpaStatus {
    guard(|| {
        let spec = pulse(delta_norm)?;
        *out(out_db, "out_db")? = pl5(&spec);
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TmpaEfficiencies {
    pub eta_tma: f64,
    pub eta_s: f64,
    pub eta: f64,
    pub pl5_db: f64,
    /// Mean power in the wanted harmonic.
    pub p_useful: f64,
    /// Mean power over every harmonic.
    pub p_radiated: f64,
    /// Power of the same array without time modulation.
    pub p_static: f64,
}

/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_efficiencies(delta_norm: f64, n_elements: usize, out_report: *mut TmpaEfficiencies) -> TmpaStatus {
    guard(|| {
        let spec = pulse(delta_norm)?;
        let r = efficiencies(&spec, n_elements).map_err(check)?;
        *out(out_report, "out_report")? = TmpaEfficiencies {
            eta_tma: r.eta_tma,
            eta_s: r.eta_s,
            eta: r.eta,
            pl5_db: r.pl5_db,
            p_useful: r.p_u_tm,
            p_radiated: r.p_r_tm,
            p_static: r.p_r_st,
        };
        Ok(())
    })
}

/// Smallest normalized rise/fall time whose 5th-harmonic level is at or below
/// `target_db`.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_design_delta(target_db: f64, out_delta_norm: *mut f64) -> TmpaStatus {
    guard(|| {
        let outcome = design_delta(target_db).map_err(check)?;
        *out(out_delta_norm, "out_delta_norm")? = outcome.delta_norm;
        Ok(())
    })
}

/// Writes `n_elements` steering delays (fractions of the modulation period).
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_steering_delays(
    n_elements: usize,
    theta_scan_deg: f64,
    spacing_wl: f64,
    out_delays: *mut f64,
    out_len: usize,
) -> TmpaStatus {
    guard(|| {
        let delays = steering_delays(n_elements, theta_scan_deg, spacing_wl).map_err(check)?;
        copy_out(&delays, out_delays, out_len)
    })
}

/// Complex excitation of harmonic `q` for an element delayed by `delay_norm`.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_dynamic_excitation(
    q: u32,
    delta_norm: f64,
    delay_norm: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TmpaStatus {
    guard(|| {
        let spec = pulse(delta_norm)?;
        let c = dynamic_excitation(q, &spec, delay_norm).map_err(check)?;
        *out(out_re, "out_re")? = c.re;
        *out(out_im, "out_im")? = c.im;
        Ok(())
    })
}

/// Opaque linear array.
pub struct TmpaArray(ArrayConfig);

fn boxed<T>(value: T, dst: *mut *mut T) -> Result<(), TmpaStatus> {
    *out(dst, "out handle")? = Box::into_raw(Box::new(value));
    Ok(())
}

/// Array steered to `theta_scan_deg` with progressive delays.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_array_steered(
    n_elements: usize,
    spacing_wl: f64,
    theta_scan_deg: f64,
    out_array: *mut *mut TmpaArray,
) -> TmpaStatus {
    guard(|| {
        let config = ArrayConfig::steered(n_elements, spacing_wl, theta_scan_deg).map_err(check)?;
        boxed(TmpaArray(config), out_array)
    })
}

/// Array with explicit per-element delays.
///
/// # Safety
/// `delays` must be null or point to `n_elements` readable values.
#[no_mangle]
pub unsafe extern "C" fn tmpa_array_with_delays(
    n_elements: usize,
    spacing_wl: f64,
    delays: *const f64,
    out_array: *mut *mut TmpaArray,
) -> TmpaStatus {
    guard(|| {
        if delays.is_null() {
            return Err(fail(TmpaStatus::NullPointer, "delays is null"));
        }
        // SAFETY: non-null, and the caller guarantees `n_elements` values.
        let delays = unsafe { std::slice::from_raw_parts(delays, n_elements) }.to_vec();
        let config = ArrayConfig::with_delays(n_elements, spacing_wl, delays).map_err(check)?;
        boxed(TmpaArray(config), out_array)
    })
}

/// Releases an array. Null is ignored.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_array_free(array: *mut TmpaArray) {
    if !array.is_null() {
        // SAFETY: the pointer came from Box::into_raw in this library.
        drop(unsafe { Box::from_raw(array) });
    }
}

/// Directivity in dBi. `out_closed_form_dbi` receives NaN when the closed form
/// does not apply; either out-pointer may be null.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_array_directivity(
    array: *const TmpaArray,
    delta_norm: f64,
    q_max: u32,
    out_closed_form_dbi: *mut f64,
    out_numerical_dbi: *mut f64,
) -> TmpaStatus {
    guard(|| {
        let array = input(array, "array")?;
        let d = directivity(&array.0, pulse(delta_norm)?, q_max).map_err(check)?;
        // SAFETY: each pointer is null or writable.
        if let Some(p) = unsafe { out_closed_form_dbi.as_mut() } {
            *p = d.closed_form_dbi.unwrap_or(f64::NAN);
        }
        if let Some(p) = unsafe { out_numerical_dbi.as_mut() } {
            *p = d.numerical_dbi;
        }
        Ok(())
    })
}

/// Opaque set of per-harmonic power patterns.
pub struct TmpaPattern(PatternResult);

/// Patterns of every kept harmonic on `theta_points` angles over [0, 180] degrees.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_pattern_compute(
    array: *const TmpaArray,
    delta_norm: f64,
    q_max: u32,
    theta_points: usize,
    out_pattern: *mut *mut TmpaPattern,
) -> TmpaStatus {
    guard(|| {
        let array = input(array, "array")?;
        let grid = theta_grid(theta_points).map_err(check)?;
        let p = full_pattern(&array.0, pulse(delta_norm)?, q_max, &grid).map_err(check)?;
        boxed(TmpaPattern(p), out_pattern)
    })
}

/// Number of angles; 0 for a null handle.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_pattern_points(pattern: *const TmpaPattern) -> usize {
    // SAFETY: null or a live handle.
    unsafe { pattern.as_ref() }.map_or(0, |p| p.0.theta_grid_deg.len())
}

/// Number of harmonics; 0 for a null handle.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_pattern_harmonic_count(pattern: *const TmpaPattern) -> usize {
    // SAFETY: null or a live handle.
    unsafe { pattern.as_ref() }.map_or(0, |p| p.0.harmonics.len())
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TmpaHarmonicInfo {
    pub q: u32,
    /// `+1` above the carrier, `-1` below.
    pub band_sign: i32,
    /// Peak level relative to the wanted harmonic, dB.
    pub peak_db: f64,
    pub peak_theta_deg: f64,
}

/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_pattern_harmonic_info(
    pattern: *const TmpaPattern,
    index: usize,
    out_info: *mut TmpaHarmonicInfo,
) -> TmpaStatus {
    guard(|| {
        let p = input(pattern, "pattern")?;
        let h = p.0.harmonics.get(index).ok_or_else(|| {
            fail(TmpaStatus::InvalidArgument, format!("harmonic index {index} out of {}", p.0.harmonics.len()))
        })?;
        *out(out_info, "out_info")? = TmpaHarmonicInfo {
            q: h.q,
            band_sign: h.band.signed(1) as i32,
            peak_db: h.peak_db,
            peak_theta_deg: h.peak_theta_deg,
        };
        Ok(())
    })
}

/// Copies the angle grid, degrees.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_pattern_theta(pattern: *const TmpaPattern, out_theta: *mut f64, out_len: usize) -> TmpaStatus {
    guard(|| copy_out(&input(pattern, "pattern")?.0.theta_grid_deg, out_theta, out_len))
}

/// Copies the dB pattern of harmonic `index`.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_pattern_db(
    pattern: *const TmpaPattern,
    index: usize,
    out_db: *mut f64,
    out_len: usize,
) -> TmpaStatus {
    guard(|| {
        let p = input(pattern, "pattern")?;
        let h = p.0.harmonics.get(index).ok_or_else(|| {
            fail(TmpaStatus::InvalidArgument, format!("harmonic index {index} out of {}", p.0.harmonics.len()))
        })?;
        copy_out(&h.db, out_db, out_len)
    })
}

/// Releases a pattern. Null is ignored.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_pattern_free(pattern: *mut TmpaPattern) {
    if !pattern.is_null() {
        // SAFETY: the pointer came from Box::into_raw in this library.
        drop(unsafe { Box::from_raw(pattern) });
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TmpaVerifyReport {
    pub max_abs_error: f64,
    pub suppressed_max_relative: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Time-domain check of the closed-form harmonic amplitudes in direction
/// `theta_deg`, using `samples` per period and bins up to `q_max`.
///
/// # Safety
/// Pointer arguments follow the contract in the crate documentation.
#[no_mangle]
pub unsafe extern "C" fn tmpa_verify(
    array: *const TmpaArray,
    delta_norm: f64,
    theta_deg: f64,
    samples: usize,
    q_max: u32,
    out_report: *mut TmpaVerifyReport,
) -> TmpaStatus {
    guard(|| {
        let array = input(array, "array")?;
        let r = verify_array(&array.0, &pulse(delta_norm)?, theta_deg, samples, q_max).map_err(check)?;
        *out(out_report, "out_report")? = TmpaVerifyReport {
            max_abs_error: r.max_abs_error,
            suppressed_max_relative: r.suppressed_max_relative,
            tolerance: r.tolerance,
            passed: r.passed,
        };
        Ok(())
    })
}
