//! C ABI for `fgn-projection`.
//!
//! Coefficient vectors are returned behind an opaque `FgnCoefficients`
//! handle that the caller releases with `fgn_coefficients_free`. Every
//! fallible call returns an `FgnStatus`; on failure the message is available
//! from `fgn_last_error_message` on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fgn_projection::bilateral::{norm_bilateral, q_coefficients, BilateralMethod};
use fgn_projection::onesided::{gamma, norm_one_sided, OneSidedMethod};
use fgn_projection::{rho_prefix, FgnError, HurstIndex};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgnStatus {
    Ok = 0,
    InvalidArgument = 1,
    NumericalFailure = 2,
    NullPointer = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgnMethod {
    Solve = 0,
    Recursive = 1,
    Closed = 2,
}

/// Opaque coefficient vector.
pub struct FgnCoefficients {
    first_index: usize,
    values: Vec<f64>,
    residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &FgnError) -> FgnStatus {
    set_error(e.to_string());
    if e.is_numerical() {
        FgnStatus::NumericalFailure
    } else {
        FgnStatus::InvalidArgument
    }
}

fn guard(f: impl FnOnce() -> Result<(), FgnStatus>) -> FgnStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FgnStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            FgnStatus::Panic
        }
    }
}

fn hurst(h: f64) -> Result<HurstIndex, FgnStatus> {
    HurstIndex::new(h).map_err(|e| status_of(&e))
}

fn null_check<T>(p: *const T, what: &str) -> Result<(), FgnStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(FgnStatus::NullPointer)
    } else {
        Ok(())
    }
}

unsafe fn copy_out(values: &[f64], out: *mut f64, len: usize) -> Result<(), FgnStatus> {
    null_check(out, "output buffer")?;
    if len < values.len() {
        set_error(format!(
            "buffer holds {len} values, {} needed",
            values.len()
        ));
        return Err(FgnStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
    Ok(())
}

unsafe fn hand_out(c: FgnCoefficients, out: *mut *mut FgnCoefficients) -> Result<(), FgnStatus> {
    *out = Box::into_raw(Box::new(c));
    Ok(())
}

/// Writes `rho_0, ..., rho_max_lag` into `out`, which must hold `max_lag + 1` values.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fgn_rho(h: f64, max_lag: u64, out: *mut f64, len: usize) -> FgnStatus {
    guard(|| {
        let table = rho_prefix(hurst(h)?, max_lag);
        copy_out(table.as_slice(), out, len)
    })
}

/// One-sided coefficients `Gamma_n^k`, `k = 2..n`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn fgn_gamma_new(
    h: f64,
    n: usize,
    method: FgnMethod,
    out: *mut *mut FgnCoefficients,
) -> FgnStatus {
    guard(|| {
        null_check(out, "handle pointer")?;
        let m = match method {
            FgnMethod::Solve => OneSidedMethod::Solve,
            FgnMethod::Recursive => OneSidedMethod::Recursive,
            FgnMethod::Closed => {
                set_error("no closed form for the one-sided coefficients");
                return Err(FgnStatus::InvalidArgument);
            }
        };
        let g = gamma(hurst(h)?, n, m).map_err(|e| status_of(&e))?;
        hand_out(
            FgnCoefficients {
                first_index: 2,
                values: g.as_slice().to_vec(),
                residual: g.residual,
            },
            out,
        )
    })
}

/// Bilateral coefficients `Q_j^k`, `k = 1..j`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn fgn_q_new(
    h: f64,
    window: usize,
    method: FgnMethod,
    out: *mut *mut FgnCoefficients,
) -> FgnStatus {
    guard(|| {
        null_check(out, "handle pointer")?;
        let m = match method {
            FgnMethod::Solve => BilateralMethod::Solve,
            FgnMethod::Recursive => BilateralMethod::Recursive,
            FgnMethod::Closed => BilateralMethod::Closed,
        };
        let q = q_coefficients(hurst(h)?, window, m).map_err(|e| status_of(&e))?;
        hand_out(
            FgnCoefficients {
                first_index: 1,
                values: q.as_slice().to_vec(),
                residual: q.residual,
            },
            out,
        )
    })
}

/// Number of coefficients held by `c`; zero for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fgn_coefficients_len(c: *const FgnCoefficients) -> usize {
    c.as_ref().map_or(0, |c| c.values.len())
}

/// Index `k` of the first coefficient (2 for `Gamma`, 1 for `Q`); zero for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fgn_coefficients_first_index(c: *const FgnCoefficients) -> usize {
    c.as_ref().map_or(0, |c| c.first_index)
}

/// Residual of the linear system the coefficients solve; NaN for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn fgn_coefficients_residual(c: *const FgnCoefficients) -> f64 {
    c.as_ref().map_or(f64::NAN, |c| c.residual)
}

/// Coefficient `k`, counted from `fgn_coefficients_first_index`.
///
/// # Safety
/// `c` must be a live handle and `value` a writable double.
#[no_mangle]
pub unsafe extern "C" fn fgn_coefficients_get(
    c: *const FgnCoefficients,
    k: usize,
    value: *mut f64,
) -> FgnStatus {
    guard(|| {
        null_check(c, "handle")?;
        null_check(value, "output pointer")?;
        let c = &*c;
        let idx = k
            .checked_sub(c.first_index)
            .filter(|&i| i < c.values.len())
            .ok_or_else(|| {
                set_error(format!(
                    "index {k} outside {}..{}",
                    c.first_index,
                    c.first_index + c.values.len()
                ));
                FgnStatus::InvalidArgument
            })?;
        *value = c.values[idx];
        Ok(())
    })
}

/// Copies all coefficients into `out`.
///
/// # Safety
/// `c` must be a live handle and `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fgn_coefficients_copy(
    c: *const FgnCoefficients,
    out: *mut f64,
    len: usize,
) -> FgnStatus {
    guard(|| {
        null_check(c, "handle")?;
        copy_out(&(*c).values, out, len)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `c` must be null or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn fgn_coefficients_free(c: *mut FgnCoefficients) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// `R_1(n)` and `R_2(n)`.
///
/// # Safety
/// `r1` and `r2` must be writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fgn_norms(h: f64, n: usize, r1: *mut f64, r2: *mut f64) -> FgnStatus {
    guard(|| {
        null_check(r1, "r1")?;
        null_check(r2, "r2")?;
        let h = hurst(h)?;
        let a = norm_one_sided(h, n).map_err(|e| status_of(&e))?;
        let b = norm_bilateral(h, n).map_err(|e| status_of(&e))?;
        *r1 = a;
        *r2 = b;
        Ok(())
    })
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn fgn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fgn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
