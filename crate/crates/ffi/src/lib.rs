//! C ABI over the `weibtail` estimators.
//!
//! Every function returns a [`WtStatus`]; on failure a message describing the
//! error is available from [`wt_last_error_message`] on the same thread.
//! Samples live behind an opaque [`WtSample`] handle that must be released
//! with [`wt_sample_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use weibtail::tail::{weissman_quantile, ConditionalTail};
use weibtail::{
    cv_bandwidth, gamma_unconditional, Bandwidth, BandwidthGrid, CensoredSample, Error, HazardVariant,
    KernelSpec, TailEstimate, TailVariant,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    ConfigError = 4,
    EmptyNeighborhood = 10,
    InvalidK = 11,
    ZeroHazardAtThreshold = 12,
    ZeroDenominator = 13,
    NonPositiveData = 14,
    EstimationError = 15,
    Panic = 99,
}

pub const WT_KERNEL_ASYMMETRIC_LINEAR: u32 = 0;
pub const WT_KERNEL_BIQUADRATIC: u32 = 1;

pub const WT_HAZARD_NEG_LOG_KM: u32 = 0;
pub const WT_HAZARD_NELSON_AALEN: u32 = 1;

pub const WT_VARIANT_COMPLETE_LITERAL: u32 = 1;
pub const WT_VARIANT_COMPLETE_HAZARD: u32 = 2;
pub const WT_VARIANT_CENSORED: u32 = 3;

/// Opaque censored sample.
pub struct WtSample {
    inner: CensoredSample,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WtTailEstimate {
    pub gamma_hat: f64,
    pub y_n: f64,
    /// NaN when the estimator has no hazard anchor.
    pub hazard_at_threshold: f64,
    /// Bandwidth used; NaN for the unconditional estimator.
    pub h: f64,
    pub k: usize,
    pub n_exceedances: usize,
    pub excluded_infinite: usize,
    pub degenerate: bool,
}

impl From<&TailEstimate> for WtTailEstimate {
    fn from(e: &TailEstimate) -> Self {
        WtTailEstimate {
            gamma_hat: e.gamma_hat,
            y_n: e.y_n,
            hazard_at_threshold: e.hazard_at_threshold.unwrap_or(f64::NAN),
            h: e.h.unwrap_or(f64::NAN),
            k: e.k,
            n_exceedances: e.n_exceedances,
            excluded_infinite: e.excluded_infinite,
            degenerate: e.degenerate,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WtStatus {
    match e {
        Error::Parse { .. } | Error::EmptyFile | Error::Io(_) => WtStatus::ParseError,
        Error::Config(_) | Error::InvalidBandwidth(_) => WtStatus::ConfigError,
        Error::EmptyNeighborhood { .. } => WtStatus::EmptyNeighborhood,
        Error::InvalidK { .. } => WtStatus::InvalidK,
        Error::ZeroHazardAtThreshold => WtStatus::ZeroHazardAtThreshold,
        Error::ZeroDenominator => WtStatus::ZeroDenominator,
        Error::NonPositiveData => WtStatus::NonPositiveData,
        Error::InvalidLevel(_) | Error::InvalidObservation(_) | Error::EmptyInput => WtStatus::InvalidArgument,
    }
}

enum Failure {
    Status(WtStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null() -> Failure {
    Failure::Status(WtStatus::NullPointer, "null pointer argument".into())
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Status(WtStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> WtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WtStatus::Ok
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_last_error(msg);
            s
        }
        Err(_) => {
            set_last_error("internal panic".into());
            WtStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, n: usize) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn sample_ref<'a>(s: *const WtSample) -> Result<&'a CensoredSample, Failure> {
    s.as_ref().map(|s| &s.inner).ok_or_else(null)
}

fn kernel(code: u32) -> Result<KernelSpec, Failure> {
    match code {
        WT_KERNEL_ASYMMETRIC_LINEAR => Ok(KernelSpec::AsymmetricLinear),
        WT_KERNEL_BIQUADRATIC => Ok(KernelSpec::Biquadratic),
        c => Err(invalid(format!("unknown kernel code {c}"))),
    }
}

fn hazard(code: u32) -> Result<HazardVariant, Failure> {
    match code {
        WT_HAZARD_NEG_LOG_KM => Ok(HazardVariant::NegLogKm),
        WT_HAZARD_NELSON_AALEN => Ok(HazardVariant::NelsonAalen),
        c => Err(invalid(format!("unknown hazard code {c}"))),
    }
}

fn variant(code: u32) -> Result<TailVariant, Failure> {
    match code {
        WT_VARIANT_COMPLETE_LITERAL => Ok(TailVariant::CompleteLiteral),
        WT_VARIANT_COMPLETE_HAZARD => Ok(TailVariant::CompleteHazard),
        WT_VARIANT_CENSORED => Ok(TailVariant::Censored),
        c => Err(invalid(format!("unknown variant code {c}"))),
    }
}

/// Builds a sample from `n` parallel values; `delta[i]` nonzero means uncensored.
///
/// # Safety
/// `x`, `z` and `delta` must point to `n` readable elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_sample_new(
    x: *const f64,
    z: *const f64,
    delta: *const u8,
    n: usize,
    out: *mut *mut WtSample,
) -> WtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let (x, z, d) = (slice(x, n)?, slice(z, n)?, slice(delta, n)?);
        let d: Vec<bool> = d.iter().map(|&v| v != 0).collect();
        let inner = CensoredSample::from_columns(x, z, &d)?;
        *out = Box::into_raw(Box::new(WtSample { inner }));
        Ok(())
    })
}

/// Loads a dataset CSV (`time, delta, covariate`).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_sample_load_csv(path: *const c_char, out: *mut *mut WtSample) -> WtStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return Err(null());
        }
        let p = CStr::from_ptr(path).to_str().map_err(|_| invalid("path is not UTF-8"))?;
        let inner = weibtail::dataset::load_csv(Path::new(p))?.sample;
        *out = Box::into_raw(Box::new(WtSample { inner }));
        Ok(())
    })
}

/// Releases a sample; null is ignored.
///
/// # Safety
/// `sample` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn wt_sample_free(sample: *mut WtSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of observations, 0 for null.
///
/// # Safety
/// `sample` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wt_sample_len(sample: *const WtSample) -> usize {
    sample.as_ref().map_or(0, |s| s.inner.len())
}

/// Kernel conditional tail coefficient at `x`. `h` may be `INFINITY` for equal weights.
///
/// # Safety
/// `sample` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn wt_gamma_conditional(
    sample: *const WtSample,
    x: f64,
    h: f64,
    kernel_code: u32,
    k: usize,
    variant_code: u32,
    hazard_code: u32,
    out: *mut WtTailEstimate,
) -> WtStatus {
    guard(|| {
        let s = sample_ref(sample)?;
        if out.is_null() {
            return Err(null());
        }
        let tail = ConditionalTail::new(s, x, Bandwidth::new(h)?, kernel(kernel_code)?, hazard(hazard_code)?)?;
        *out = (&tail.estimate(k, variant(variant_code)?)?).into();
        Ok(())
    })
}

/// Order-statistic tail coefficient of `n` positive values (any order).
///
/// # Safety
/// `data` must point to `n` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_gamma_unconditional(
    data: *const f64,
    n: usize,
    k: usize,
    out: *mut WtTailEstimate,
) -> WtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = (&gamma_unconditional(slice(data, n)?, k)?).into();
        Ok(())
    })
}

/// `q = y_n (-log p / hazard_at_threshold)^gamma_hat`.
///
/// # Safety
/// `out_q` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_weissman(
    survival_level: f64,
    gamma_hat: f64,
    y_n: f64,
    hazard_at_threshold: f64,
    out_q: *mut f64,
) -> WtStatus {
    guard(|| {
        if out_q.is_null() {
            return Err(null());
        }
        let anchor = TailEstimate {
            gamma_hat,
            k: 0,
            y_n,
            h: None,
            variant: TailVariant::Censored,
            n_exceedances: 0,
            hazard_at_threshold: Some(hazard_at_threshold),
            excluded_infinite: 0,
            degenerate: false,
        };
        *out_q = weissman_quantile(survival_level, &anchor, hazard_at_threshold)?.q_hat;
        Ok(())
    })
}

/// Cross-validated bandwidth from a strictly increasing grid.
///
/// # Safety
/// `sample` must be a live handle, `grid` must point to `grid_len` values and
/// `out_h` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wt_cv_bandwidth(
    sample: *const WtSample,
    grid: *const f64,
    grid_len: usize,
    kernel_code: u32,
    out_h: *mut f64,
) -> WtStatus {
    guard(|| {
        let s = sample_ref(sample)?;
        if out_h.is_null() {
            return Err(null());
        }
        let grid = BandwidthGrid::new(slice(grid, grid_len)?.to_vec())?;
        *out_h = cv_bandwidth(s, &grid, kernel(kernel_code)?).get();
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn wt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
