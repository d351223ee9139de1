#ifndef CAMPANA_H
#define CAMPANA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  CAMPANA_STATUS_OK = 0,
  CAMPANA_STATUS_NULL_POINTER = 1,
  CAMPANA_STATUS_INVALID_ARGUMENT = 2,
  CAMPANA_STATUS_DOMAIN_ERROR = 3,
  CAMPANA_STATUS_BUDGET_EXCEEDED = 4,
  CAMPANA_STATUS_OVERFLOW = 5,
  CAMPANA_STATUS_DISAGREEMENT = 6,
  CAMPANA_STATUS_INTERNAL_ERROR = 7,
} CampanaStatus;

/**
 * Opaque orbifold handle.
 */
typedef struct CampanaOrbifold CampanaOrbifold;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string of the library; static, do not free.
 */
const char *campana_version(void);

/**
 * Human-readable description of a status code; static, do not free.
 */
const char *campana_status_message(CampanaStatus status);

/**
 * Moebius function of n (requires n >= 1); writes -1, 0 or 1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
CampanaStatus campana_moebius(uint64_t n, int32_t *out);

/**
 * Is x m-full (every prime divisor to order >= m)? Writes 0 or 1.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
CampanaStatus campana_is_m_full(int64_t x, uint32_t m, int32_t *out);

/**
 * Vinogradov mean-value exponent s0(m), m >= 2.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
CampanaStatus campana_s0(uint32_t m, uint64_t *out);

/**
 * Canonical decomposition x = sign * u^m * prod v_r^(m+r) of an m-full
 * integer. `v_out` must hold exactly m-1 slots.
 *
 * # Safety
 * `sign_out` and `u_out` must be valid pointers; `v_out` must point to at
 * least m-1 writable u64 slots (it may be null when m == 1).
 */
CampanaStatus campana_mfull_decompose(int64_t x,
                                      uint32_t m,
                                      int32_t *sign_out,
                                      uint64_t *u_out,
                                      uint64_t *v_out);

/**
 * Rebuild sign * u^m * prod v_r^(m+r); the exact inverse of the
 * decomposition. `v` must hold m-1 entries.
 *
 * # Safety
 * `v` must point to `v_len` readable u64 values (null allowed when
 * `v_len == 0`); `out` must be a valid pointer.
 */
CampanaStatus campana_mfull_compose(int32_t sign,
                                    uint64_t u,
                                    const uint64_t *v,
                                    uintptr_t v_len,
                                    uint32_t m,
                                    int64_t *out);

/**
 * Create an orbifold from degree k, coefficients `c[0..len]` and
 * multiplicities `m[0..len]`. On success writes a handle that must be
 * released with
 * [`campana_orbifold_free`].
 *
 * # Safety
 * `c` and `m` must point to `len` readable elements; `out` must be a valid
 * pointer.
 */
CampanaStatus campana_orbifold_new(uint32_t k,
                                   const int64_t *c,
                                   const uint32_t *m,
                                   uintptr_t len,
                                   CampanaOrbifold **out);

/**
 * Release an orbifold handle. Null is a no-op.
 *
 * # Safety
 * `handle` must be null or a pointer returned by [`campana_orbifold_new`]
 * that has not been freed yet.
 */
void campana_orbifold_free(CampanaOrbifold *handle);

/**
 * Does the orbifold satisfy the main admissibility condition
 * `sum 1/(2 s0(k m_i)) > 1` (with k >= 2)? Writes 0 or 1.
 *
 * # Safety
 * `handle` must be a live orbifold handle; `out` must be a valid pointer.
 */
CampanaStatus campana_orbifold_admissible(const CampanaOrbifold *handle, int32_t *out);

/**
 * Fujita invariant k*Gamma = sum 1/m_i - k as an exact fraction.
 *
 * # Safety
 * `handle` must be a live orbifold handle; `num` and `den` must be valid
 * pointers.
 */
CampanaStatus campana_fujita_exponent(const CampanaOrbifold *handle, int64_t *num, int64_t *den);

/**
 * Exact number of Campana points of height <= bound (half the primitive
 * solution count).
 *
 * # Safety
 * `handle` must be a live orbifold handle; `out` must be a valid pointer.
 */
CampanaStatus campana_count_campana(const CampanaOrbifold *handle, uint64_t bound, uint64_t *out);

/**
 * Exact N(bound): primitive tuples with m_i-full nonzero coordinates
 * solving the form.
 *
 * # Safety
 * `handle` must be a live orbifold handle; `out` must be a valid pointer.
 */
CampanaStatus campana_count_n(const CampanaOrbifold *handle, uint64_t bound, uint64_t *out);

/**
 * Exact power-box count M: tuples u with zeta_i u_i^(m~_i) <= b_tilde and
 * sum d_i zeta_i u_i^(m~_i) = 0, by histogram convolution.
 *
 * # Safety
 * `d`, `zeta` and `m_tilde` must each point to `len` readable elements;
 * `out` must be a valid pointer.
 */
CampanaStatus campana_count_m(const int64_t *d,
                              const uint64_t *zeta,
                              const uint32_t *m_tilde,
                              uintptr_t len,
                              uint64_t b_tilde,
                              uint64_t *out);

/**
 * Predicted main term for the power-box count at `b_tilde` (singular
 * series times singular integral times b_tilde^Gamma~), with default
 * truncations and the given Monte Carlo seed. Writes the value and a
 * heuristic uncertainty.
 *
 * # Safety
 * `d`, `zeta` and `m_tilde` must each point to `len` readable elements;
 * `main_term_out` and `uncertainty_out` must be valid pointers.
 */
CampanaStatus campana_predict_m(const int64_t *d,
                                const uint64_t *zeta,
                                const uint32_t *m_tilde,
                                uintptr_t len,
                                double b_tilde,
                                uint64_t seed,
                                double *main_term_out,
                                double *uncertainty_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAMPANA_H */
