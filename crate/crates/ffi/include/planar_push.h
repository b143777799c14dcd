#ifndef PLANAR_PUSH_H
#define PLANAR_PUSH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_NULL_POINTER = 1,
  PP_STATUS_INVALID_ARGUMENT = 2,
  PP_STATUS_CONFIG = 3,
  PP_STATUS_NOT_CONVERGED = 4,
  PP_STATUS_NUMERICAL = 5,
  PP_STATUS_INSUFFICIENT_DATA = 6,
  PP_STATUS_BUFFER_TOO_SMALL = 7,
  PP_STATUS_PANIC = 8,
} PpStatus;

/**
 * Surface friction law.
 */
typedef struct PpEllipse PpEllipse;

/**
 * Simulation model and collection loop settings built from a configuration.
 */
typedef struct PpModel PpModel;

/**
 * Limit ellipse parameters; `phi` in radians.
 */
typedef struct PpEllipseParams {
  double mu_a;
  double mu_b;
  double m0;
  double n0;
  double phi;
} PpEllipseParams;

/**
 * Planar pose; metres and radians.
 */
typedef struct PpPose {
  double x;
  double y;
  double theta;
} PpPose;

/**
 * One push and drag-back. `delta` is the push outcome in the initial
 * object frame; `post` starts the next cycle.
 */
typedef struct PpCycle {
  struct PpPose initial;
  struct PpPose pushed;
  struct PpPose delta;
  struct PpPose post;
} PpCycle;

typedef struct PpFixedPoint {
  /**
   * In `[0, 360)`.
   */
  double theta_deg;
  /**
   * Slope of the interpolated map at the fixed point.
   */
  double slope;
  bool stable;
} PpFixedPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the calling thread's most recent failure, or null.
 */
const char *pp_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *pp_version(void);

/**
 * Creates a limit ellipse; fails unless the origin lies strictly inside.
 *
 * # Safety
 * `out` must be null or valid for writing a pointer.
 */
enum PpStatus pp_ellipse_new(struct PpEllipseParams params, struct PpEllipse **out);

/**
 * Creates the plywood limit ellipse.
 *
 * # Safety
 * `out` must be null or valid for writing a pointer.
 */
enum PpStatus pp_ellipse_plywood(struct PpEllipse **out);

/**
 * # Safety
 * `ellipse` must be null or a handle from this library not yet freed.
 */
void pp_ellipse_free(struct PpEllipse *ellipse);

/**
 * # Safety
 * `ellipse` must be null or a live handle; `out` null or writable.
 */
enum PpStatus pp_ellipse_params(const struct PpEllipse *ellipse, struct PpEllipseParams *out);

/**
 * Boundary coefficient `(mu_x, mu_y)` maximizing dissipation for sliding
 * velocity `(vx, vy)`, which must be nonzero.
 *
 * # Safety
 * `ellipse` must be null or a live handle; the outputs null or writable.
 */
enum PpStatus pp_max_dissipation_coefficient(const struct PpEllipse *ellipse,
                                             double vx,
                                             double vy,
                                             double *mu_x,
                                             double *mu_y);

/**
 * Friction force (N) on a point sliding at `(vx, vy)` under `normal` N,
 * regularized below `v_eps`.
 *
 * # Safety
 * `ellipse` must be null or a live handle; the outputs null or writable.
 */
enum PpStatus pp_point_friction_force(const struct PpEllipse *ellipse,
                                      double vx,
                                      double vy,
                                      double normal,
                                      double v_eps,
                                      double *fx,
                                      double *fy);

/**
 * Fits a limit ellipse to `count` samples stored as interleaved
 * `mu_x, mu_y` pairs.
 *
 * # Safety
 * `samples` must point to `2 * count` readable doubles; `out` null or
 * writable.
 */
enum PpStatus pp_fit_limit_ellipse(const double *samples, size_t count, struct PpEllipse **out);

/**
 * Builds a model from configuration text in the command-line tool's TOML
 * format, `seed` included.
 *
 * # Safety
 * `toml` must be null or a nul-terminated string; `out` null or writable.
 */
enum PpStatus pp_model_from_toml(const char *toml, struct PpModel **out);

/**
 * # Safety
 * `model` must be null or a handle from this library not yet freed.
 */
void pp_model_free(struct PpModel *model);

/**
 * Rest pose with the drag ring on the drag target at orientation `theta`.
 *
 * # Safety
 * `model` must be null or a live handle; `out` null or writable.
 */
enum PpStatus pp_model_canonical_start(const struct PpModel *model,
                                       double theta,
                                       struct PpPose *out);

/**
 * Simulates one push and drag-back from `initial`.
 *
 * # Safety
 * `model` must be null or a live handle; `out` null or writable.
 */
enum PpStatus pp_model_run_cycle(const struct PpModel *model,
                                 struct PpPose initial,
                                 struct PpCycle *out);

/**
 * Evaluates the cycle map at `count` initial orientations (degrees),
 * writing the next orientation of each to `next_deg`.
 *
 * # Safety
 * `grid_deg` must point to `count` readable and `next_deg` to `count`
 * writable doubles.
 */
enum PpStatus pp_model_cycle_map(const struct PpModel *model,
                                 const double *grid_deg,
                                 size_t count,
                                 double *next_deg);

/**
 * Fixed points of a sampled cycle map `theta0_deg[i] -> next_deg[i]`.
 *
 * The number found is written to `found`. When it exceeds `capacity`, the
 * call fails with `BufferTooSmall` and nothing is written to `out`.
 *
 * # Safety
 * `theta0_deg` and `next_deg` must point to `count` readable doubles,
 * `out` to `capacity` writable entries, `found` null or writable.
 */
enum PpStatus pp_find_stable_directions(const double *theta0_deg,
                                        const double *next_deg,
                                        size_t count,
                                        struct PpFixedPoint *out,
                                        size_t capacity,
                                        size_t *found);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLANAR_PUSH_H */
