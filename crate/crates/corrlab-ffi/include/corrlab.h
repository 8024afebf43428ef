#ifndef CORRLAB_H
#define CORRLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum CorrlabStatus {
  Ok = 0,
  NullPointer = 1,
  InvalidArgument = 2,
  ParseError = 3,
  ComputeError = 4,
  BufferTooSmall = 5,
} CorrlabStatus;

/**
 * Opaque correspondence handle.
 */
typedef struct CorrlabCorr CorrlabCorr;

/**
 * Opaque sampled-measure handle.
 */
typedef struct CorrlabMeasure CorrlabMeasure;

/**
 * Summary of a log-rate certificate run.
 */
typedef struct CorrlabRateSummary {
  double big_d;
  double r;
  double c5;
  /**
   * 1 when every grid point passed
   */
  int32_t all_pass;
} CorrlabRateSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the most recent error message on this thread into `buf`.
 *
 * # Safety
 * `buf` must point to `len` writable bytes.
 */
enum CorrlabStatus corrlab_last_error_message(char *buf, uintptr_t len);

/**
 * Build a correspondence from its JSON graph document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CorrlabStatus corrlab_corr_from_json(const char *json, struct CorrlabCorr **out);

/**
 * Build the parameter-family correspondence with rational parameter
 * c = c_num / c_den.
 *
 * # Safety
 * `out` must be writable.
 */
enum CorrlabStatus corrlab_corr_family(uint32_t d0,
                                       uint32_t d1,
                                       int64_t c_num,
                                       int64_t c_den,
                                       struct CorrlabCorr **out);

/**
 * Release a correspondence handle.
 *
 * # Safety
 * `ptr` must come from this library and not be freed twice.
 */
void corrlab_corr_free(struct CorrlabCorr *ptr);

/**
 * Bidegree of the correspondence.
 *
 * # Safety
 * Valid handle and writable out pointers.
 */
enum CorrlabStatus corrlab_corr_bidegree(const struct CorrlabCorr *corr,
                                         uint32_t *d0,
                                         uint32_t *d1);

/**
 * Adjoint correspondence as a fresh handle.
 *
 * # Safety
 * Valid handle; writable out.
 */
enum CorrlabStatus corrlab_corr_adjoint(const struct CorrlabCorr *corr, struct CorrlabCorr **out);

/**
 * Composition f . g (g applied first) as a fresh handle.
 *
 * # Safety
 * Valid handles; writable out.
 */
enum CorrlabStatus corrlab_corr_compose(const struct CorrlabCorr *f,
                                        const struct CorrlabCorr *g,
                                        struct CorrlabCorr **out);

/**
 * Serialized graph JSON of the correspondence.
 *
 * # Safety
 * `buf` must point to `len` writable bytes; `written` receives the
 * required size (including NUL) when the buffer is too small.
 */
enum CorrlabStatus corrlab_corr_to_json(const struct CorrlabCorr *corr,
                                        char *buf,
                                        uintptr_t len,
                                        uintptr_t *written);

/**
 * Local multiplicity of the first projection.
 *
 * # Safety
 * Valid handle; writable out.
 */
enum CorrlabStatus corrlab_local_multiplicity(const struct CorrlabCorr *corr, uint32_t *rho);

/**
 * Adjoint multiplicity (local multiplicity of the second projection).
 *
 * # Safety
 * Valid handle; writable out.
 */
enum CorrlabStatus corrlab_adjoint_multiplicity(const struct CorrlabCorr *corr, uint32_t *delta);

/**
 * kappa = 1 / (25 k (4 rho)^q) as an exact fraction.
 *
 * # Safety
 * Writable out pointers.
 */
enum CorrlabStatus corrlab_kappa(uint32_t k,
                                 uint32_t q,
                                 uint32_t rho,
                                 uint64_t *num,
                                 uint64_t *den);

/**
 * kappa~ with kappa~^{-1} = 25 k (4 delta)^{k-q+1}, as an exact fraction.
 *
 * # Safety
 * Writable out pointers.
 */
enum CorrlabStatus corrlab_kappa_tilde(uint32_t k,
                                       uint32_t q,
                                       uint32_t delta,
                                       uint64_t *num,
                                       uint64_t *den);

/**
 * Degree profile of a model action. `model`: 0 projective (uses s1),
 * 1 graph-sum (s1, s2), 2 symmetric product (s1 = d0, s2 = d1). The
 * buffer must hold k + 1 entries.
 *
 * # Safety
 * `out` must point to `out_len` writable entries.
 */
enum CorrlabStatus corrlab_degree_profile(uint32_t model,
                                          uint64_t s1,
                                          uint64_t s2,
                                          uint32_t k,
                                          uint64_t *out,
                                          uintptr_t out_len);

/**
 * Verify the log-rate certificate on a xi grid; summary written on
 * success. Returns ComputeError when a grid point violates the chain.
 *
 * # Safety
 * `xi` must point to `xi_len` readable doubles; `out` writable.
 */
enum CorrlabStatus corrlab_certify_log_rate(double dq,
                                            double dqm1,
                                            double kappa,
                                            const double *xi,
                                            uintptr_t xi_len,
                                            struct CorrlabRateSummary *out);

/**
 * Fiber-motion exponent fit at a base point.
 *
 * # Safety
 * Valid handle; writable out pointers.
 */
enum CorrlabStatus corrlab_loja_exponent(const struct CorrlabCorr *corr,
                                         double z0_re,
                                         double z0_im,
                                         double *slope,
                                         double *r2);

/**
 * Depth-n Monte-Carlo backward orbit of the point (a_re, a_im); the
 * resulting measure handle must be freed with `corrlab_measure_free`.
 *
 * # Safety
 * Valid handle; writable out.
 */
enum CorrlabStatus corrlab_backward_orbit(const struct CorrlabCorr *corr,
                                          double a_re,
                                          double a_im,
                                          uint32_t depth,
                                          uint32_t paths,
                                          uint64_t seed,
                                          struct CorrlabMeasure **out);

/**
 * Number of atoms in a measure.
 *
 * # Safety
 * Valid handle; writable out.
 */
enum CorrlabStatus corrlab_measure_len(const struct CorrlabMeasure *measure, uintptr_t *len);

/**
 * Copy atoms as (re, im, weight, chart) rows into a flat double buffer of
 * 4 * len entries, in the stored chart coordinates.
 *
 * # Safety
 * `out` must point to `out_len` writable doubles.
 */
enum CorrlabStatus corrlab_measure_atoms(const struct CorrlabMeasure *measure,
                                         double *out,
                                         uintptr_t out_len);

/**
 * Release a measure handle.
 *
 * # Safety
 * `ptr` must come from this library and not be freed twice.
 */
void corrlab_measure_free(struct CorrlabMeasure *ptr);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORRLAB_H */
