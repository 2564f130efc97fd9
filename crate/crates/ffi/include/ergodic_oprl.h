#ifndef ERGODIC_OPRL_H
#define ERGODIC_OPRL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum EoStatus {
  EO_STATUS_OK = 0,
  EO_STATUS_NULL_POINTER = 1,
  EO_STATUS_INVALID_ARGUMENT = 2,
  EO_STATUS_INVALID_PARAMS = 3,
  EO_STATUS_PARAMETER_EXHAUSTION = 4,
  EO_STATUS_NUMERICAL = 5,
  EO_STATUS_DOMAIN = 6,
  EO_STATUS_PANIC = 7,
} EoStatus;

/**
 * Opaque Jacobi parameter sequence.
 */
typedef struct EoJacobiParams EoJacobiParams;

/**
 * Opaque ergodic family.
 */
typedef struct EoModel EoModel;

/**
 * Outcome of a transfer-matrix bound check.
 */
typedef struct EoBoundReport {
  double lhs;
  double rhs;
  double log_lhs;
  double log_rhs;
  double constant_c;
  double margin;
  bool holds;
} EoBoundReport;

/**
 * Cesàro averages along one orbit.
 */
typedef struct EoCesaroAverages {
  double avg_p2;
  double avg_q2;
  double avg_im_u2;
  double avg_u2_re;
  double avg_u2_im;
  double rho_l;
  double weight;
  double kernel_density;
  double ids_from_rotation;
} EoCesaroAverages;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *eo_version(void);

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into the library on the
 * same thread.
 */
const char *eo_last_error_message(void);

/**
 * Creates parameters `a_1..a_len`, `b_1..b_len`.
 *
 * # Safety
 * `a` and `b` must be valid for reading `len` values; `out` must be valid
 * for writing one pointer.
 */
enum EoStatus eo_params_new(const double *a,
                            const double *b,
                            size_t len,
                            struct EoJacobiParams **out);

/**
 * Releases parameters; null is ignored.
 *
 * # Safety
 * `params` must be null or a handle from this library not yet freed.
 */
void eo_params_free(struct EoJacobiParams *params);

/**
 * Number of stored `(a_j, b_j)` pairs, or 0 for null.
 *
 * # Safety
 * `params` must be null or a live handle.
 */
size_t eo_params_len(const struct EoJacobiParams *params);

/**
 * Free Jacobi parameters `a_n = 1`, `b_n = 0`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum EoStatus eo_model_free_jacobi(struct EoModel **out);

/**
 * Almost Mathieu family `a_n = 1`, `b_n = 2λ cos(παn + θ)`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum EoStatus eo_model_almost_mathieu(double lambda,
                                      double alpha,
                                      double theta,
                                      struct EoModel **out);

/**
 * Periodic family with one period `a[0..period]`, `b[0..period]`.
 *
 * # Safety
 * `a` and `b` must be valid for reading `period` values; `out` must be
 * valid for writing one pointer.
 */
enum EoStatus eo_model_periodic(const double *a,
                                const double *b,
                                size_t period,
                                struct EoModel **out);

/**
 * Anderson family with i.i.d. `b_n` uniform in `coupling·[-1/2, 1/2]`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum EoStatus eo_model_anderson(double coupling, uint64_t seed, struct EoModel **out);

/**
 * Releases a model; null is ignored.
 *
 * # Safety
 * `model` must be null or a handle from this library not yet freed.
 */
void eo_model_free(struct EoModel *model);

/**
 * Parameters `a_j(S^shift ω)`, `b_j(S^shift ω)` for `j = 1..=n`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be valid for writing one pointer.
 */
enum EoStatus eo_model_realize(const struct EoModel *model,
                               int64_t shift,
                               size_t n,
                               struct EoJacobiParams **out);

/**
 * Writes `p_0(x) .. p_n(x)` to `p_out`. Values beyond the `f64` range
 * come out infinite.
 *
 * # Safety
 * `params` must be a live handle; `p_out` must be valid for writing
 * `n + 1` values.
 */
enum EoStatus eo_evaluate_polys(const struct EoJacobiParams *params,
                                double x,
                                size_t n,
                                double *p_out);

/**
 * `K_n(x, y)`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be valid for writing one value.
 */
enum EoStatus eo_kernel(const struct EoJacobiParams *params,
                        double x,
                        double y,
                        size_t n,
                        double *out);

/**
 * Number of eigenvalues of the `n × n` truncation below `e`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be valid for writing one value.
 */
enum EoStatus eo_eig_count(const struct EoJacobiParams *params, size_t n, double e, size_t *out);

/**
 * Writes the `n` zeros of `p_n`, ascending, to `zeros_out`.
 *
 * # Safety
 * `params` must be a live handle; `zeros_out` must be valid for writing
 * `n` values.
 */
enum EoStatus eo_all_zeros(const struct EoJacobiParams *params, size_t n, double *zeros_out);

/**
 * `max_{|a| <= A} |K_n(x0 + a/n, x0 + a/n)/K_n(x0, x0) - 1|`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be valid for writing one value.
 */
enum EoStatus eo_wiggle_deviation(const struct EoJacobiParams *params,
                                  double x0,
                                  size_t n,
                                  double big_a,
                                  double *out);

/**
 * Cesàro-form bound at `x0 + z/(n+1)`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be valid for writing one report.
 */
enum EoStatus eo_check_cesaro_bound(const struct EoJacobiParams *params,
                                    double x0,
                                    double z_re,
                                    double z_im,
                                    size_t n,
                                    struct EoBoundReport *out);

/**
 * Pointwise bound at `x0 + z/(n+1)`.
 *
 * # Safety
 * `params` must be a live handle; `out` must be valid for writing one report.
 */
enum EoStatus eo_check_sup_bound(const struct EoJacobiParams *params,
                                 double x0,
                                 double z_re,
                                 double z_im,
                                 size_t n,
                                 struct EoBoundReport *out);

/**
 * Phase-averaged density of states at `x` with its standard error.
 *
 * # Safety
 * `model` must be a live handle; `rho_out` and `stderr_out` must be valid
 * for writing one value each.
 */
enum EoStatus eo_dos_kotani(const struct EoModel *model,
                            double x,
                            double epsilon,
                            size_t phase_samples,
                            uint64_t seed,
                            double *rho_out,
                            double *stderr_out);

/**
 * Cesàro averages of `p_j²`, `q_j²` and the Deift–Simon wave at real `x`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be valid for writing one record.
 */
enum EoStatus eo_cesaro_averages(const struct EoModel *model,
                                 int64_t shift,
                                 double x,
                                 double epsilon,
                                 size_t n,
                                 struct EoCesaroAverages *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ERGODIC_OPRL_H */
