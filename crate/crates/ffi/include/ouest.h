#ifndef OUEST_H
#define OUEST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OuestStatus {
  OUEST_STATUS_OK = 0,
  OUEST_STATUS_INPUT = 1,
  OUEST_STATUS_DOMAIN = 2,
  OUEST_STATUS_RANGE = 3,
  OUEST_STATUS_PRECISION = 4,
  OUEST_STATUS_TIMEOUT = 5,
  OUEST_STATUS_SOLVER = 6,
  OUEST_STATUS_CONFIG = 7,
  OUEST_STATUS_NULL_POINTER = 8,
  OUEST_STATUS_PANIC = 9,
} OuestStatus;

typedef enum OuestServiceKind {
  /**
   * Parameter: mean.
   */
  OUEST_SERVICE_KIND_EXPONENTIAL = 0,
  /**
   * Parameter: alpha.
   */
  OUEST_SERVICE_KIND_LOGNORMAL_NORMALIZED = 1,
  /**
   * Parameter: the constant service time.
   */
  OUEST_SERVICE_KIND_CONSTANT = 2,
} OuestServiceKind;

typedef enum OuestMethod {
  OUEST_METHOD_BISECTION = 0,
  OUEST_METHOD_NEWTON = 1,
  OUEST_METHOD_FIXED_POINT = 2,
} OuestMethod;

typedef enum OuestPolicyKind {
  OUEST_POLICY_KIND_UNIFORM = 0,
  OUEST_POLICY_KIND_ZERO_WAIT = 1,
  OUEST_POLICY_KIND_MSE_OPTIMAL = 2,
  OUEST_POLICY_KIND_AGE_OPTIMAL = 3,
} OuestPolicyKind;

/**
 * Signal model and service law with their metrics.
 */
typedef struct OuestModel OuestModel;

/**
 * Fixed Monte Carlo panel bound to a model.
 */
typedef struct OuestPanel OuestPanel;

typedef struct OuestMetrics {
  double mse_y;
  double mse_inf;
  double gamma;
  double laplace_2theta;
  double mean_y;
} OuestMetrics;

typedef struct OuestSolution {
  double beta;
  double v;
  double trigger_age;
  double mse_opt;
  double lagrange_multiplier;
  double mean_interval;
  double residual;
  uint64_t iterations;
  bool constrained;
} OuestSolution;

/**
 * Policy parameters; fields not used by `kind` are ignored.
 */
typedef struct OuestPolicy {
  enum OuestPolicyKind kind;
  double period;
  double beta;
  double v;
} OuestPolicy;

typedef struct OuestSimResult {
  double time_avg_mse;
  double mse_std_error;
  double avg_rate;
  double avg_inter_delivery;
  double time_avg_age_penalty;
  bool feasible;
  bool queue_overflowed;
} OuestSimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call into this library.
 */
const char *ouest_last_error_message(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable `double`.
 */
enum OuestStatus ouest_g(double x, double *out);

/**
 * # Safety
 * `out` must be a valid pointer to writable `double`.
 */
enum OuestStatus ouest_g_inv(double y, double *out);

/**
 * Create a model. `service_param` is the mean, `alpha`, or the constant
 * time, depending on `kind`.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to free
 * with [`ouest_model_free`].
 */
enum OuestStatus ouest_model_new(double theta,
                                 double sigma,
                                 double mu,
                                 enum OuestServiceKind kind,
                                 double service_param,
                                 uint64_t seed,
                                 struct OuestModel **out);

/**
 * # Safety
 * `model` must come from [`ouest_model_new`] and not be used afterwards.
 */
void ouest_model_free(struct OuestModel *model);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum OuestStatus ouest_model_metrics(const struct OuestModel *model, struct OuestMetrics *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum OuestStatus ouest_r1(const struct OuestModel *model, double v, double *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum OuestStatus ouest_r2(const struct OuestModel *model, double v, double *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum OuestStatus ouest_threshold_v(const struct OuestModel *model, double beta, double *out);

/**
 * Draw a panel of `n` service and error samples.
 *
 * # Safety
 * `model` must be a live handle and `out` writable; free the result with
 * [`ouest_panel_free`].
 */
enum OuestStatus ouest_panel_new(const struct OuestModel *model,
                                 size_t n,
                                 uint64_t seed,
                                 struct OuestPanel **out);

/**
 * # Safety
 * `panel` must come from [`ouest_panel_new`] and not be used afterwards.
 */
void ouest_panel_free(struct OuestPanel *panel);

/**
 * Solve for `β`. Pass `fmax = INFINITY` for no rate limit and `tol <= 0`
 * for the default tolerance. `signal_aware` selects the MSE-optimal policy,
 * otherwise the age-optimal one.
 *
 * # Safety
 * `panel` must be a live handle and `out` writable.
 */
enum OuestStatus ouest_solve(const struct OuestPanel *panel,
                             double fmax,
                             enum OuestMethod method,
                             double tol,
                             bool signal_aware,
                             struct OuestSolution *out);

/**
 * Simulate `policy` for `horizon` time units. `fmax` only sets the
 * feasibility flag; pass `INFINITY` for none.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum OuestStatus ouest_simulate(const struct OuestModel *model,
                                struct OuestPolicy policy,
                                double horizon,
                                double fmax,
                                uint64_t seed,
                                struct OuestSimResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OUEST_H */
