#ifndef QBM_H
#define QBM_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum QbmStatus {
  QBM_STATUS_OK = 0,
  QBM_STATUS_NULL_POINTER = 1,
  QBM_STATUS_INVALID_PARAMETER = 2,
  QBM_STATUS_DOMAIN = 3,
  QBM_STATUS_NUMERICAL = 4,
  QBM_STATUS_INTERNAL = 5,
  QBM_STATUS_PANIC = 6,
} QbmStatus;

/**
 * Oscillator and Drude bath parameters.
 */
typedef struct QbmParams QbmParams;

/**
 * Zero-mean Gaussian reduced state.
 */
typedef struct QbmState QbmState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length
 * without the terminator, or 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
uintptr_t qbm_last_error_message(char *buf, uintptr_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *qbm_version(void);

/**
 * Creates a parameter handle.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum QbmStatus qbm_params_new(double mass,
                              double omega0,
                              double gamma,
                              double cutoff,
                              struct QbmParams **out);

/**
 * # Safety
 * `params` must be null or a handle from [`qbm_params_new`] not yet freed.
 */
void qbm_params_free(struct QbmParams *params);

/**
 * Position and momentum variances at temperature `t >= 0`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_moments(const struct QbmParams *params, double t, double *q2, double *p2);

/**
 * Free energy `F(T)`, `T >= 0`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_free_energy(const struct QbmParams *params, double t, double *out);

/**
 * Thermodynamic entropy `S(T)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_entropy(const struct QbmParams *params, double t, double *out);

/**
 * Mean oscillator energy `<H_s>`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_mean_energy(const struct QbmParams *params, double t, double *out);

/**
 * Coupling for which the zero-temperature mean energy equals `target`,
 * other parameters from `params`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_gamma_for_ground_energy(const struct QbmParams *params,
                                           double target,
                                           double *out);

/**
 * Heat per bit of von Neumann entropy for a relative frequency step
 * `delta`; compare with `t ln 2`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_landauer_ratio(const struct QbmParams *params,
                                  double t,
                                  double delta,
                                  double *out);

/**
 * Equilibrium reduced state at temperature `t`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_state_from_bath(const struct QbmParams *params, double t, struct QbmState **out);

/**
 * State with the given variances; the oscillator scale comes from `params`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_state_new(const struct QbmParams *params,
                             double q2,
                             double p2,
                             struct QbmState **out);

/**
 * # Safety
 * `state` must be null or a live handle.
 */
void qbm_state_free(struct QbmState *state);

/**
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_state_purity(const struct QbmState *state, double *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_state_von_neumann_entropy(const struct QbmState *state, double *out);

/**
 * Mean occupation and its variance in the uncoupled oscillator basis.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_state_occupation(const struct QbmState *state, double *mean, double *variance);

/**
 * Population `rho_nn` of level `n`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum QbmStatus qbm_state_population(const struct QbmState *state, uintptr_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBM_H */
