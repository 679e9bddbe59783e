#ifndef ZENOSIM_H
#define ZENOSIM_H

/* Generated from the zenosim-ffi crate by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Which complete projector family a measurement uses.
typedef enum ZenoProjector {
  // Two sectors: levels {0, 1} together, level 2 alone.
  ZENO_PROJECTOR_PARTIAL = 0,
  // Every level measured separately.
  ZENO_PROJECTOR_FULL = 1,
} ZenoProjector;

// Detected relation between a measured and a free survival curve.
typedef enum ZenoRegime {
  // No sustained deviation beyond the threshold.
  ZENO_REGIME_NONE = 0,
  // Measured survival held above the free curve (QZE).
  ZENO_REGIME_QZE = 1,
  // Measured survival pushed below the free curve (IZE).
  ZENO_REGIME_IZE = 2,
  // Both kinds of interval are present.
  ZENO_REGIME_MIXED = 3,
} ZenoRegime;

// Result of every fallible call in this interface.
typedef enum ZenoStatus {
  // The call succeeded and all out-pointers are filled.
  ZENO_STATUS_OK = 0,
  // A required pointer argument was null.
  ZENO_STATUS_NULL_POINTER = 1,
  // An argument was rejected; see `zeno_last_error_message`.
  ZENO_STATUS_INVALID_ARGUMENT = 2,
  // The computation lost numerical accuracy and was aborted.
  ZENO_STATUS_NUMERICAL_FAILURE = 3,
  // An internal invariant failed; the handle is still safe to free.
  ZENO_STATUS_INTERNAL_PANIC = 4,
} ZenoStatus;

// Opaque simulator: a three-level atom under a resonant double drive.
typedef struct ZenoSimulator ZenoSimulator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread.
//
// The pointer stays valid until the next failing call on the same thread.
// Never returns null; the message is empty if nothing failed yet.
const char *zeno_last_error_message(void);

// Create a simulator for drive amplitudes `omega01`, `omega12` and drive
// phases `phi01`, `phi12`. On success writes the new handle to `out`;
// release it with `zeno_sim_free`.
//
// # Safety
// `out` must be null or valid for writing one pointer.
enum ZenoStatus zeno_sim_new(double omega01,
                             double omega12,
                             double phi01,
                             double phi12,
                             struct ZenoSimulator **out);

// Destroy a simulator created by `zeno_sim_new`. Null is ignored.
//
// # Safety
// `sim` must be null or a handle from `zeno_sim_new` not yet freed.
void zeno_sim_free(struct ZenoSimulator *sim);

// Write the recurrence time `T_P = 2π / sqrt(omega01² + omega12²)` to
// `out`.
//
// # Safety
// `sim` must be null or a live handle from `zeno_sim_new`; `out` must be
// null or valid for writing one `double`.
enum ZenoStatus zeno_sim_poincare_time(const struct ZenoSimulator *sim, double *out);

// Populations of the three levels under the free double-drive evolution,
// starting from level 0, sampled at `len` grid points `tau` (units of the
// recurrence time). Writes `len` values to each of `p0`, `p1`, `p2`.
//
// # Safety
// `sim` must be null or a live handle from `zeno_sim_new`; `tau`, `p0`,
// `p1`, `p2` must each be null or valid for `len` elements.
enum ZenoStatus zeno_sim_free_curve(const struct ZenoSimulator *sim,
                                    const double *tau,
                                    size_t len,
                                    double *p0,
                                    double *p1,
                                    double *p2);

// Populations under `n + 1` ideal measurements equally spaced across one
// recurrence time (the event at `t = 0` included). Grid semantics match
// `zeno_sim_free_curve`.
//
// # Safety
// `sim` must be null or a live handle from `zeno_sim_new`; `tau`, `p0`,
// `p1`, `p2` must each be null or valid for `len` elements.
enum ZenoStatus zeno_sim_measured_curve(const struct ZenoSimulator *sim,
                                        enum ZenoProjector projector,
                                        size_t n,
                                        const double *tau,
                                        size_t len,
                                        double *p0,
                                        double *p1,
                                        double *p2);

// Populations under the continuous-measurement master equation with a
// train of `n + 1` rate bumps of integrated weight `weight` and standard
// deviation `width_fraction` of the recurrence time, spread across the
// grid window. The grid must be sorted ascending and end inside (0, 1].
//
// # Safety
// `sim` must be null or a live handle from `zeno_sim_new`; `tau`, `p0`,
// `p1`, `p2` must each be null or valid for `len` elements.
enum ZenoStatus zeno_sim_lindblad_curve(const struct ZenoSimulator *sim,
                                        enum ZenoProjector projector,
                                        size_t n,
                                        double weight,
                                        double width_fraction,
                                        const double *tau,
                                        size_t len,
                                        double *p0,
                                        double *p1,
                                        double *p2);

// Classify the measured curve for `n` measurements against the free curve
// on a uniform grid of `grid_points` samples over one recurrence time,
// with significance threshold `epsilon`. Writes the regime to `regime`
// and the largest supporting deviation to `margin`.
//
// # Safety
// `sim` must be null or a live handle from `zeno_sim_new`; `regime` and
// `margin` must each be null or valid for one write.
enum ZenoStatus zeno_sim_detect_regime(const struct ZenoSimulator *sim,
                                       enum ZenoProjector projector,
                                       size_t n,
                                       size_t grid_points,
                                       double epsilon,
                                       enum ZenoRegime *regime,
                                       double *margin);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZENOSIM_H */
