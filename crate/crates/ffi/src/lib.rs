//! C interface to `fsw-core`.
//!
//! Parameters and measures live behind opaque handles created with
//! `fsw_params_new` / `fsw_measure_new` and released with the matching
//! `_free`. Every call returns an [`FswStatus`]; on failure the message is
//! available from [`fsw_last_error`] on the same thread. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fsw_core::error::Error;
use fsw_core::fsw::{embed, embed_measure, EmbeddingParams, MassMode};
use fsw_core::measure::{DiscreteMeasure, ProbabilityMeasure};
use fsw_core::wasserstein;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FswStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    TooLarge = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FswMassMode {
    Plain = 0,
    Regularized = 1,
    Homogeneous = 2,
}

/// Sampled embedding parameters.
pub struct FswParams(EmbeddingParams);

/// A finite weighted point set.
pub struct FswMeasure(DiscreteMeasure);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(message: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
}

fn fail(status: FswStatus, message: impl Into<String>) -> FswStatus {
    set_error(message.into());
    status
}

fn from_core(e: Error) -> FswStatus {
    let status = match e {
        Error::DimensionMismatch { .. } => FswStatus::DimensionMismatch,
        Error::TooLarge { .. } => FswStatus::TooLarge,
        _ => FswStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> FswStatus) -> FswStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == FswStatus::Ok {
                set_error(String::new());
            }
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(FswStatus::Panic, format!("panic: {msg}"))
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(FswStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

fn probability(m: &FswMeasure) -> Result<ProbabilityMeasure, FswStatus> {
    ProbabilityMeasure::try_from(m.0.clone()).map_err(from_core)
}

/// Samples `m` parameter pairs for dimension `d` from `seed`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn fsw_params_new(d: usize, m: usize, seed: u64, out: *mut *mut FswParams) -> FswStatus {
    guard(|| {
        non_null!(out);
        match EmbeddingParams::sample(d, m, seed) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(FswParams(p)));
                FswStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `params` must come from `fsw_params_new` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fsw_params_free(params: *mut FswParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Number of embedding coordinates, or 0 for a null handle.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsw_params_m(params: *const FswParams) -> usize {
    params.as_ref().map_or(0, |p| p.0.m())
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `params` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fsw_params_dim(params: *const FswParams) -> usize {
    params.as_ref().map_or(0, |p| p.0.d())
}

/// Builds a measure from `n` points of dimension `dim`, stored row-major in
/// `points` (length `n * dim`). A null `weights` means uniform weights 1/n.
///
/// # Safety
/// `points` must hold `n * dim` doubles, `weights` null or `n` doubles, and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fsw_measure_new(
    dim: usize,
    n: usize,
    points: *const f64,
    weights: *const f64,
    out: *mut *mut FswMeasure,
) -> FswStatus {
    guard(|| {
        non_null!(points, out);
        let Some(len) = n.checked_mul(dim) else {
            return fail(FswStatus::TooLarge, "n * dim overflows");
        };
        let pts = std::slice::from_raw_parts(points, len).to_vec();
        let w = if weights.is_null() {
            vec![1.0 / n as f64; n]
        } else {
            std::slice::from_raw_parts(weights, n).to_vec()
        };
        match DiscreteMeasure::new(dim, pts, w) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(FswMeasure(m)));
                FswStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `measure` must come from `fsw_measure_new` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fsw_measure_free(measure: *mut FswMeasure) {
    if !measure.is_null() {
        drop(Box::from_raw(measure));
    }
}

/// Embeds a probability measure into `out[0..m]`.
///
/// # Safety
/// Handles must be live; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fsw_embed(
    params: *const FswParams,
    measure: *const FswMeasure,
    out: *mut f64,
    out_len: usize,
) -> FswStatus {
    guard(|| {
        non_null!(params, measure, out);
        let (params, measure) = (&(*params).0, &*measure);
        if out_len < params.m() {
            return fail(FswStatus::BufferTooSmall, format!("need {} doubles, got {out_len}", params.m()));
        }
        let mu = match probability(measure) {
            Ok(mu) => mu,
            Err(s) => return s,
        };
        match embed(&mu, params) {
            Ok(e) => {
                std::slice::from_raw_parts_mut(out, e.coords.len()).copy_from_slice(&e.coords);
                FswStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Embeds a measure of arbitrary total mass into `out[0..m]`.
///
/// # Safety
/// Handles must be live; `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fsw_embed_measure(
    params: *const FswParams,
    measure: *const FswMeasure,
    rho: f64,
    mode: FswMassMode,
    out: *mut f64,
    out_len: usize,
) -> FswStatus {
    guard(|| {
        non_null!(params, measure, out);
        let params = &(*params).0;
        if out_len < params.m() {
            return fail(FswStatus::BufferTooSmall, format!("need {} doubles, got {out_len}", params.m()));
        }
        let mode = match mode {
            FswMassMode::Plain => MassMode::Plain,
            FswMassMode::Regularized => MassMode::Regularized,
            FswMassMode::Homogeneous => MassMode::Homogeneous,
        };
        match embed_measure(&(*measure).0, params, rho, mode) {
            Ok(e) => {
                std::slice::from_raw_parts_mut(out, e.coords.len()).copy_from_slice(&e.coords);
                FswStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Exact p-Wasserstein distance. When `plan` is non-null it receives the
/// optimal plan row-major, `len(mu) * len(nu)` entries.
///
/// # Safety
/// Handles must be live; `cost` writable; `plan` null or `plan_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fsw_wasserstein(
    mu: *const FswMeasure,
    nu: *const FswMeasure,
    p: f64,
    cost: *mut f64,
    plan: *mut f64,
    plan_len: usize,
) -> FswStatus {
    guard(|| {
        non_null!(mu, nu, cost);
        let (mu, nu) = match (probability(&*mu), probability(&*nu)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        if !plan.is_null() && plan_len < mu.len() * nu.len() {
            return fail(FswStatus::BufferTooSmall, format!("plan needs {} doubles", mu.len() * nu.len()));
        }
        match wasserstein::wasserstein_exact(&mu, &nu, p) {
            Ok((c, tp)) => {
                *cost = c;
                if !plan.is_null() {
                    let out = std::slice::from_raw_parts_mut(plan, tp.rows() * tp.cols());
                    for i in 0..tp.rows() {
                        for j in 0..tp.cols() {
                            out[i * tp.cols() + j] = tp.get(i, j);
                        }
                    }
                }
                FswStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Monte-Carlo sliced-Wasserstein estimate from `slices` random directions.
/// `std_error` (nullable) receives the standard error of the squared estimate.
///
/// # Safety
/// Handles must be live; `estimate` writable; `std_error` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fsw_sliced_wasserstein(
    mu: *const FswMeasure,
    nu: *const FswMeasure,
    slices: usize,
    seed: u64,
    estimate: *mut f64,
    std_error: *mut f64,
) -> FswStatus {
    guard(|| {
        non_null!(mu, nu, estimate);
        let (mu, nu) = match (probability(&*mu), probability(&*nu)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        match wasserstein::sliced_wasserstein_mc(&mu, &nu, slices, seed) {
            Ok(est) => {
                *estimate = est.estimate;
                if !std_error.is_null() {
                    *std_error = est.std_error;
                }
                FswStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Copies the last error message of this thread into `buf` as a
/// NUL-terminated string, truncating if needed. Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn fsw_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}
