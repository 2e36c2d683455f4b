#ifndef GSQG_H
#define GSQG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define GSQG_OK 0

#define GSQG_ERR_NULL -1

#define GSQG_ERR_INVALID_INPUT -2

#define GSQG_ERR_DEGENERATE -3

#define GSQG_ERR_NOT_SIMPLE -4

#define GSQG_ERR_STEP_REJECTED -5

#define GSQG_ERR_TOPOLOGY_BREACH -6

#define GSQG_ERR_CEILING_HIT -7

#define GSQG_ERR_BUFFER_TOO_SMALL -8

#define GSQG_ERR_OTHER -9

#define GSQG_ERR_PANIC -99

#define GSQG_METRIC_FRECHET 0

#define GSQG_METRIC_HAUSDORFF 1

#define GSQG_METRIC_DELTA 2

#define GSQG_METRIC_DEVIATION 3

// A closed plane curve.
typedef struct GsqgCurve GsqgCurve;

// A patch family with its kernel and current time.
typedef struct GsqgSim GsqgSim;

// Curve functionals of a simulation state.
typedef struct GsqgDiagnostics {
  double t;
  double q;
  double w;
  double l;
  double u_inf;
  double min_pair_delta;
  double min_self_delta;
} GsqgDiagnostics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the most recent error message of this thread into `buf` (NUL-terminated,
// truncated to `cap`). Returns the full message length in bytes.
//
// # Safety
// `buf` must be null or point to `cap` writable bytes.
size_t gsqg_last_error(char *buf, size_t cap);

// Curve through `n` points given as interleaved `x, y` pairs.
//
// # Safety
// `xy` must point to `2n` doubles; `out` must be writable.
int32_t gsqg_curve_from_nodes(const double *xy, size_t n, struct GsqgCurve **out);

// Constant-speed circle with `n` nodes.
//
// # Safety
// `out` must be writable.
int32_t gsqg_curve_circle(double radius, double cx, double cy, size_t n, struct GsqgCurve **out);

// Constant-speed resampling to `n` nodes.
//
// # Safety
// `curve` must be a live handle; `out` must be writable.
int32_t gsqg_curve_resample(const struct GsqgCurve *curve, size_t n, struct GsqgCurve **out);

// # Safety
// `curve` must be null or a handle not yet freed.
void gsqg_curve_free(struct GsqgCurve *curve);

// Number of nodes, or 0 for a null handle.
//
// # Safety
// `curve` must be null or a live handle.
size_t gsqg_curve_len(const struct GsqgCurve *curve);

// Writes the nodes as interleaved `x, y` pairs into `xy`, which holds `cap` doubles.
//
// # Safety
// `curve` must be a live handle; `xy` must point to `cap` writable doubles.
int32_t gsqg_curve_nodes(const struct GsqgCurve *curve, double *xy, size_t cap);

// Arclength of the trigonometric interpolant.
//
// # Safety
// `curve` must be a live handle; `out` must be writable.
int32_t gsqg_curve_length(const struct GsqgCurve *curve, double *out);

// Signed polygon area, positive for counterclockwise curves.
//
// # Safety
// `curve` must be a live handle; `out` must be writable.
int32_t gsqg_curve_area(const struct GsqgCurve *curve, double *out);

// Distance between two curves; `metric` is one of the `GSQG_METRIC_*` constants.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
int32_t gsqg_distance(const struct GsqgCurve *a,
                      const struct GsqgCurve *b,
                      int32_t metric,
                      double *out);

// Simulation of `count` patches with the given strengths, exponent `alpha` and
// mollification radius `epsilon`. The curves are copied.
//
// # Safety
// `curves` and `strengths` must point to `count` entries; `out` must be writable.
int32_t gsqg_sim_new(const struct GsqgCurve *const *curves,
                     const double *strengths,
                     size_t count,
                     double alpha,
                     double epsilon,
                     struct GsqgSim **out);

// # Safety
// `sim` must be null or a handle not yet freed.
void gsqg_sim_free(struct GsqgSim *sim);

// One RK4 step of size `dt`. On failure the state is unchanged.
//
// # Safety
// `sim` must be a live handle.
int32_t gsqg_sim_step(struct GsqgSim *sim, double dt);

// Integrates to time `t_end` with CFL-limited steps. Returns
// `GSQG_ERR_TOPOLOGY_BREACH` or `GSQG_ERR_CEILING_HIT` when the run stops early; the
// state then holds the last accepted step.
//
// # Safety
// `sim` must be a live handle.
int32_t gsqg_sim_advance(struct GsqgSim *sim, double t_end, double cfl);

// # Safety
// `sim` must be a live handle; `out` must be writable.
int32_t gsqg_sim_diagnostics(const struct GsqgSim *sim, struct GsqgDiagnostics *out);

// Copy of the boundary of patch `index`.
//
// # Safety
// `sim` must be a live handle; `out` must be writable.
int32_t gsqg_sim_curve(const struct GsqgSim *sim, size_t index, struct GsqgCurve **out);

// Runs the randomized inequality suite; `passed` receives 1 when every check holds.
//
// # Safety
// `passed` must be writable.
int32_t gsqg_check_suite(uint64_t seed, size_t trials, int32_t *passed);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GSQG_H */
