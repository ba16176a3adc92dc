#ifndef GREYSIM_H
#define GREYSIM_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  GS_STATUS_DOMAIN = 2,
  GS_STATUS_OVERFLOW = 3,
  GS_STATUS_INVALID_INPUT = 4,
  GS_STATUS_NUMERICAL = 5,
  GS_STATUS_PANIC = 6,
} GsStatus;

typedef enum {
  GS_FBM_METHOD_CHOLESKY = 0,
  GS_FBM_METHOD_CIRCULANT = 1,
} GsFbmMethod;

/**
 * Opaque fractional Brownian motion generator.
 */
typedef struct GsFbm GsFbm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL terminated,
 * truncated to `len`). Returns the full message length, 0 when there is no
 * error.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t gs_last_error(char *buf, size_t len);

/**
 * Γ(x).
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
GsStatus gs_gamma(double x, double *out);

/**
 * E_β(x).
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
GsStatus gs_mittag_leffler(double beta, double x, double *out);

/**
 * M-Wright density M_β(τ).
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
GsStatus gs_m_wright_pdf(double beta, double tau, double *out);

/**
 * M-Wright distribution function.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
GsStatus gs_m_wright_cdf(double beta, double tau, double *out);

/**
 * Fills `out[0..n]` with draws of Y_β from stream `(seed, stream_id)`.
 *
 * # Safety
 * `out` must be null or valid for `n` writes.
 */
GsStatus gs_sample_y(double beta, uint64_t seed, uint64_t stream_id, double *out, size_t n);

/**
 * Creates a generator for B_H on the uniform grid of `steps` intervals over
 * `[0, horizon]`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
GsStatus gs_fbm_new(GsFbmMethod method, double hurst, double horizon, size_t steps, GsFbm **out);

/**
 * Number of grid points (steps + 1) of one sampled path.
 *
 * # Safety
 * `fbm` must be null or a live handle.
 */
size_t gs_fbm_len(const GsFbm *fbm);

/**
 * Writes one scalar path, starting at B_H(0) = 0, into `out[0..len]`.
 * `len` must equal [`gs_fbm_len`].
 *
 * # Safety
 * `fbm` must be a live handle and `out` valid for `len` writes.
 */
GsStatus gs_fbm_sample(const GsFbm *fbm,
                       uint64_t seed,
                       uint64_t stream_id,
                       double *out,
                       size_t len);

/**
 * Releases a generator. Null is ignored.
 *
 * # Safety
 * `fbm` must be null or a handle from [`gs_fbm_new`] not yet freed.
 */
void gs_fbm_free(GsFbm *fbm);

/**
 * Density at `z` of x0 + b t + σ B_{α,β}(t) (scalar constant fields).
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
GsStatus gs_mixture_density(double alpha,
                            double beta,
                            double sigma,
                            double drift,
                            double x0,
                            double t,
                            double z,
                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GREYSIM_H */
