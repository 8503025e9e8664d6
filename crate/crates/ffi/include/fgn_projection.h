#ifndef FGN_PROJECTION_H
#define FGN_PROJECTION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FgnStatus {
  FGN_STATUS_OK = 0,
  FGN_STATUS_INVALID_ARGUMENT = 1,
  FGN_STATUS_NUMERICAL_FAILURE = 2,
  FGN_STATUS_NULL_POINTER = 3,
  FGN_STATUS_BUFFER_TOO_SMALL = 4,
  FGN_STATUS_PANIC = 5,
} FgnStatus;

typedef enum FgnMethod {
  FGN_METHOD_SOLVE = 0,
  FGN_METHOD_RECURSIVE = 1,
  FGN_METHOD_CLOSED = 2,
} FgnMethod;

/**
 * Opaque coefficient vector.
 */
typedef struct FgnCoefficients FgnCoefficients;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Writes `rho_0, ..., rho_max_lag` into `out`, which must hold `max_lag + 1` values.
 *
 * # Safety
 * `out` must point to `len` writable doubles.
 */
enum FgnStatus fgn_rho(double h, uint64_t max_lag, double *out, size_t len);

/**
 * One-sided coefficients `Gamma_n^k`, `k = 2..n`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle owned by the caller.
 */
enum FgnStatus fgn_gamma_new(double h,
                             size_t n,
                             enum FgnMethod method,
                             struct FgnCoefficients **out);

/**
 * Bilateral coefficients `Q_j^k`, `k = 1..j`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle owned by the caller.
 */
enum FgnStatus fgn_q_new(double h,
                         size_t window,
                         enum FgnMethod method,
                         struct FgnCoefficients **out);

/**
 * Number of coefficients held by `c`; zero for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t fgn_coefficients_len(const struct FgnCoefficients *c);

/**
 * Index `k` of the first coefficient (2 for `Gamma`, 1 for `Q`); zero for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
size_t fgn_coefficients_first_index(const struct FgnCoefficients *c);

/**
 * Residual of the linear system the coefficients solve; NaN for a null handle.
 *
 * # Safety
 * `c` must be null or a live handle.
 */
double fgn_coefficients_residual(const struct FgnCoefficients *c);

/**
 * Coefficient `k`, counted from `fgn_coefficients_first_index`.
 *
 * # Safety
 * `c` must be a live handle and `value` a writable double.
 */
enum FgnStatus fgn_coefficients_get(const struct FgnCoefficients *c, size_t k, double *value);

/**
 * Copies all coefficients into `out`.
 *
 * # Safety
 * `c` must be a live handle and `out` must point to `len` writable doubles.
 */
enum FgnStatus fgn_coefficients_copy(const struct FgnCoefficients *c, double *out, size_t len);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `c` must be null or a handle not freed before.
 */
void fgn_coefficients_free(struct FgnCoefficients *c);

/**
 * `R_1(n)` and `R_2(n)`.
 *
 * # Safety
 * `r1` and `r2` must be writable doubles.
 */
enum FgnStatus fgn_norms(double h, size_t n, double *r1, double *r2);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library from the same thread.
 */
const char *fgn_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fgn_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FGN_PROJECTION_H */
