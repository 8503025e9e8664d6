use std::ffi::CStr;
use std::ptr;

use fgn_projection_ffi::*;

fn last_error() -> String {
    let p = fgn_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn rho_fills_buffer() {
    let mut buf = [0.0; 4];
    let s = unsafe { fgn_rho(0.5, 3, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(s, FgnStatus::Ok);
    assert_eq!(buf[0], 1.0);
    assert!(buf[1..].iter().all(|v| v.abs() < 1e-15));
    assert!(fgn_last_error_message().is_null());

    let s = unsafe { fgn_rho(0.7, 9, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(s, FgnStatus::BufferTooSmall);
    assert!(last_error().contains("10"));

    let s = unsafe { fgn_rho(0.7, 3, ptr::null_mut(), 4) };
    assert_eq!(s, FgnStatus::NullPointer);
}

#[test]
fn q_handle_round_trip() {
    let mut h = ptr::null_mut();
    let s = unsafe { fgn_q_new(0.6, 2, FgnMethod::Closed, &mut h) };
    assert_eq!(s, FgnStatus::Ok);
    unsafe {
        assert_eq!(fgn_coefficients_len(h), 2);
        assert_eq!(fgn_coefficients_first_index(h), 1);
        let mut v = 0.0;
        assert_eq!(fgn_coefficients_get(h, 1, &mut v), FgnStatus::Ok);
        assert!((v - 0.130739).abs() < 5e-7);
        assert_eq!(
            fgn_coefficients_get(h, 3, &mut v),
            FgnStatus::InvalidArgument
        );
        assert_eq!(
            fgn_coefficients_get(h, 0, &mut v),
            FgnStatus::InvalidArgument
        );
        let mut out = [0.0; 2];
        assert_eq!(fgn_coefficients_copy(h, out.as_mut_ptr(), 2), FgnStatus::Ok);
        assert!((out[1] - 0.043422).abs() < 5e-7);
        assert!(fgn_coefficients_residual(h) < 1e-12);
        fgn_coefficients_free(h);
        fgn_coefficients_free(ptr::null_mut());
    }
}

#[test]
fn methods_agree_across_the_boundary() {
    let mut a = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(fgn_q_new(0.8, 6, FgnMethod::Solve, &mut a), FgnStatus::Ok);
        assert_eq!(
            fgn_q_new(0.8, 6, FgnMethod::Recursive, &mut b),
            FgnStatus::Ok
        );
        let (mut x, mut y) = ([0.0; 6], [0.0; 6]);
        fgn_coefficients_copy(a, x.as_mut_ptr(), 6);
        fgn_coefficients_copy(b, y.as_mut_ptr(), 6);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-10);
        }
        fgn_coefficients_free(a);
        fgn_coefficients_free(b);

        assert_eq!(
            fgn_gamma_new(0.7, 5, FgnMethod::Solve, &mut a),
            FgnStatus::Ok
        );
        assert_eq!(
            fgn_gamma_new(0.7, 5, FgnMethod::Recursive, &mut b),
            FgnStatus::Ok
        );
        assert_eq!(fgn_coefficients_len(a), 4);
        assert_eq!(fgn_coefficients_first_index(a), 2);
        let (mut x, mut y) = (0.0, 0.0);
        fgn_coefficients_get(a, 5, &mut x);
        fgn_coefficients_get(b, 5, &mut y);
        assert!((x - y).abs() < 1e-10);
        fgn_coefficients_free(a);
        fgn_coefficients_free(b);
    }
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(
            fgn_q_new(1.5, 2, FgnMethod::Solve, &mut h),
            FgnStatus::InvalidArgument
        );
        assert!(h.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            fgn_q_new(0.7, 5, FgnMethod::Closed, &mut h),
            FgnStatus::InvalidArgument
        );
        assert_eq!(
            fgn_gamma_new(0.7, 5, FgnMethod::Closed, &mut h),
            FgnStatus::InvalidArgument
        );
        assert_eq!(
            fgn_q_new(0.7, 2, FgnMethod::Solve, ptr::null_mut()),
            FgnStatus::NullPointer
        );
        let mut v = 0.0;
        assert_eq!(
            fgn_coefficients_get(ptr::null(), 1, &mut v),
            FgnStatus::NullPointer
        );
        assert_eq!(fgn_coefficients_len(ptr::null()), 0);
        assert!(fgn_coefficients_residual(ptr::null()).is_nan());
    }
}

#[test]
fn norms_match_the_cli_example() {
    let (mut r1, mut r2) = (0.0, 0.0);
    assert_eq!(
        unsafe { fgn_norms(0.6, 2, &mut r1, &mut r2) },
        FgnStatus::Ok
    );
    assert!((r1 - 0.022111).abs() < 5e-7);
    assert!((r2 - 0.041283).abs() < 5e-7);
    assert_eq!(
        unsafe { fgn_norms(0.6, 2, ptr::null_mut(), &mut r2) },
        FgnStatus::NullPointer
    );
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(fgn_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_exports() {
    let header = include_str!("../include/fgn_projection.h");
    for name in [
        "fgn_rho",
        "fgn_gamma_new",
        "fgn_q_new",
        "fgn_coefficients_len",
        "fgn_coefficients_first_index",
        "fgn_coefficients_get",
        "fgn_coefficients_copy",
        "fgn_coefficients_residual",
        "fgn_coefficients_free",
        "fgn_norms",
        "fgn_last_error_message",
        "fgn_version",
        "typedef struct FgnCoefficients FgnCoefficients",
        "FGN_STATUS_NUMERICAL_FAILURE = 2",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
