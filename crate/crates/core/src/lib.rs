//! Projection coefficients of fractional Gaussian noise: one-sided
//! prediction coefficients, bilateral interpolation coefficients, the
//! associated Gram matrices and determinants, and numerical audits of their
//! sign and monotonicity patterns.

// Range checks are written as `!(x > a)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod autocov;
pub mod bilateral;
pub mod cli;
pub mod error;
pub mod format;
pub mod gramians;
pub mod onesided;
pub mod parallel;

pub use autocov::{rho, rho_prefix, HurstIndex};
pub use bilateral::{q_recursive, q_solve, BilateralCoefficients};
pub use error::{FgnError, Result};
pub use onesided::{gamma_recursive, gamma_solve, OneSidedCoefficients};
