#ifndef WEIBTAIL_H
#define WEIBTAIL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define WT_KERNEL_ASYMMETRIC_LINEAR 0

#define WT_KERNEL_BIQUADRATIC 1

#define WT_HAZARD_NEG_LOG_KM 0

#define WT_HAZARD_NELSON_AALEN 1

#define WT_VARIANT_COMPLETE_LITERAL 1

#define WT_VARIANT_COMPLETE_HAZARD 2

#define WT_VARIANT_CENSORED 3

typedef enum WtStatus {
  WT_STATUS_OK = 0,
  WT_STATUS_NULL_POINTER = 1,
  WT_STATUS_INVALID_ARGUMENT = 2,
  WT_STATUS_PARSE_ERROR = 3,
  WT_STATUS_CONFIG_ERROR = 4,
  WT_STATUS_EMPTY_NEIGHBORHOOD = 10,
  WT_STATUS_INVALID_K = 11,
  WT_STATUS_ZERO_HAZARD_AT_THRESHOLD = 12,
  WT_STATUS_ZERO_DENOMINATOR = 13,
  WT_STATUS_NON_POSITIVE_DATA = 14,
  WT_STATUS_ESTIMATION_ERROR = 15,
  WT_STATUS_PANIC = 99,
} WtStatus;

/**
 * Opaque censored sample.
 */
typedef struct WtSample WtSample;

typedef struct WtTailEstimate {
  double gamma_hat;
  double y_n;
  /**
   * NaN when the estimator has no hazard anchor.
   */
  double hazard_at_threshold;
  /**
   * Bandwidth used; NaN for the unconditional estimator.
   */
  double h;
  size_t k;
  size_t n_exceedances;
  size_t excluded_infinite;
  bool degenerate;
} WtTailEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a sample from `n` parallel values; `delta[i]` nonzero means uncensored.
 *
 * # Safety
 * `x`, `z` and `delta` must point to `n` readable elements; `out` must be writable.
 */
enum WtStatus wt_sample_new(const double *x,
                            const double *z,
                            const uint8_t *delta,
                            size_t n,
                            struct WtSample **out);

/**
 * Loads a dataset CSV (`time, delta, covariate`).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum WtStatus wt_sample_load_csv(const char *path, struct WtSample **out);

/**
 * Releases a sample; null is ignored.
 *
 * # Safety
 * `sample` must come from this library and not be used afterwards.
 */
void wt_sample_free(struct WtSample *sample);

/**
 * Number of observations, 0 for null.
 *
 * # Safety
 * `sample` must be null or a live handle.
 */
size_t wt_sample_len(const struct WtSample *sample);

/**
 * Kernel conditional tail coefficient at `x`. `h` may be `INFINITY` for equal weights.
 *
 * # Safety
 * `sample` must be a live handle and `out` writable.
 */
enum WtStatus wt_gamma_conditional(const struct WtSample *sample,
                                   double x,
                                   double h,
                                   uint32_t kernel_code,
                                   size_t k,
                                   uint32_t variant_code,
                                   uint32_t hazard_code,
                                   struct WtTailEstimate *out);

/**
 * Order-statistic tail coefficient of `n` positive values (any order).
 *
 * # Safety
 * `data` must point to `n` values and `out` must be writable.
 */
enum WtStatus wt_gamma_unconditional(const double *data,
                                     size_t n,
                                     size_t k,
                                     struct WtTailEstimate *out);

/**
 * `q = y_n (-log p / hazard_at_threshold)^gamma_hat`.
 *
 * # Safety
 * `out_q` must be writable.
 */
enum WtStatus wt_weissman(double survival_level,
                          double gamma_hat,
                          double y_n,
                          double hazard_at_threshold,
                          double *out_q);

/**
 * Cross-validated bandwidth from a strictly increasing grid.
 *
 * # Safety
 * `sample` must be a live handle, `grid` must point to `grid_len` values and
 * `out_h` must be writable.
 */
enum WtStatus wt_cv_bandwidth(const struct WtSample *sample,
                              const double *grid,
                              size_t grid_len,
                              uint32_t kernel_code,
                              double *out_h);

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *wt_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEIBTAIL_H */
