#ifndef FSW_H
#define FSW_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FswStatus {
  FSW_STATUS_OK = 0,
  FSW_STATUS_NULL_POINTER = 1,
  FSW_STATUS_INVALID_INPUT = 2,
  FSW_STATUS_DIMENSION_MISMATCH = 3,
  FSW_STATUS_TOO_LARGE = 4,
  FSW_STATUS_BUFFER_TOO_SMALL = 5,
  FSW_STATUS_PANIC = 6,
} FswStatus;

typedef enum FswMassMode {
  FSW_MASS_MODE_PLAIN = 0,
  FSW_MASS_MODE_REGULARIZED = 1,
  FSW_MASS_MODE_HOMOGENEOUS = 2,
} FswMassMode;

/**
 * A finite weighted point set.
 */
typedef struct FswMeasure FswMeasure;

/**
 * Sampled embedding parameters.
 */
typedef struct FswParams FswParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Samples `m` parameter pairs for dimension `d` from `seed`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum FswStatus fsw_params_new(size_t d, size_t m, uint64_t seed, struct FswParams **out);

/**
 * # Safety
 * `params` must come from `fsw_params_new` and not be freed twice. Null is ignored.
 */
void fsw_params_free(struct FswParams *params);

/**
 * Number of embedding coordinates, or 0 for a null handle.
 *
 * # Safety
 * `params` must be null or a live handle.
 */
size_t fsw_params_m(const struct FswParams *params);

/**
 * Ambient dimension, or 0 for a null handle.
 *
 * # Safety
 * `params` must be null or a live handle.
 */
size_t fsw_params_dim(const struct FswParams *params);

/**
 * Builds a measure from `n` points of dimension `dim`, stored row-major in
 * `points` (length `n * dim`). A null `weights` means uniform weights 1/n.
 *
 * # Safety
 * `points` must hold `n * dim` doubles, `weights` null or `n` doubles, and
 * `out` must be writable.
 */
enum FswStatus fsw_measure_new(size_t dim,
                               size_t n,
                               const double *points,
                               const double *weights,
                               struct FswMeasure **out);

/**
 * # Safety
 * `measure` must come from `fsw_measure_new` and not be freed twice. Null is ignored.
 */
void fsw_measure_free(struct FswMeasure *measure);

/**
 * Embeds a probability measure into `out[0..m]`.
 *
 * # Safety
 * Handles must be live; `out` must hold `out_len` doubles.
 */
enum FswStatus fsw_embed(const struct FswParams *params,
                         const struct FswMeasure *measure,
                         double *out,
                         size_t out_len);

/**
 * Embeds a measure of arbitrary total mass into `out[0..m]`.
 *
 * # Safety
 * Handles must be live; `out` must hold `out_len` doubles.
 */
enum FswStatus fsw_embed_measure(const struct FswParams *params,
                                 const struct FswMeasure *measure,
                                 double rho,
                                 enum FswMassMode mode,
                                 double *out,
                                 size_t out_len);

/**
 * Exact p-Wasserstein distance. When `plan` is non-null it receives the
 * optimal plan row-major, `len(mu) * len(nu)` entries.
 *
 * # Safety
 * Handles must be live; `cost` writable; `plan` null or `plan_len` doubles.
 */
enum FswStatus fsw_wasserstein(const struct FswMeasure *mu,
                               const struct FswMeasure *nu,
                               double p,
                               double *cost,
                               double *plan,
                               size_t plan_len);

/**
 * Monte-Carlo sliced-Wasserstein estimate from `slices` random directions.
 * `std_error` (nullable) receives the standard error of the squared estimate.
 *
 * # Safety
 * Handles must be live; `estimate` writable; `std_error` null or writable.
 */
enum FswStatus fsw_sliced_wasserstein(const struct FswMeasure *mu,
                                      const struct FswMeasure *nu,
                                      size_t slices,
                                      uint64_t seed,
                                      double *estimate,
                                      double *std_error);

/**
 * Copies the last error message of this thread into `buf` as a
 * NUL-terminated string, truncating if needed. Returns the full message
 * length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t fsw_last_error(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FSW_H */
