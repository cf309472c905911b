#ifndef KGZ_H
#define KGZ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KgzStatus {
  KGZ_STATUS_OK = 0,
  KGZ_STATUS_NULL_POINTER = 1,
  KGZ_STATUS_INVALID_ARGUMENT = 2,
  KGZ_STATUS_DIVERGENCE = 3,
  KGZ_STATUS_PANIC = 4,
} KgzStatus;

/**
 * Opaque simulation handle.
 */
typedef struct KgzSimulation KgzSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a simulation of the benchmark data on `num_points` points of
 * `[0, 2pi)`. `scheme` is 1 or 2.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer. On
 * success the handle written there must be released with
 * [`kgz_simulation_free`].
 */
enum KgzStatus kgz_simulation_new(uint32_t scheme,
                                  double c,
                                  double tau,
                                  uintptr_t num_points,
                                  struct KgzSimulation **out);

/**
 * Creates a simulation from physical samples of `z`, `dz/dt`, `n` and
 * `dn/dt` at the nodes `2 pi j / num_points`.
 *
 * # Safety
 * Each of `z`, `zdot`, `n`, `ndot` must point to `num_points` readable
 * doubles, and `out` must be valid as for [`kgz_simulation_new`].
 */
enum KgzStatus kgz_simulation_new_from_samples(uint32_t scheme,
                                               double c,
                                               double tau,
                                               uintptr_t num_points,
                                               const double *z,
                                               const double *zdot,
                                               const double *n,
                                               const double *ndot,
                                               struct KgzSimulation **out);

/**
 * Advances the simulation by `num_steps` steps.
 *
 * # Safety
 * `sim` must be a live handle from this library.
 */
enum KgzStatus kgz_simulation_step(struct KgzSimulation *sim, uintptr_t num_steps);

/**
 * Writes the current time.
 *
 * # Safety
 * `sim` must be a live handle and `time` a valid pointer to one double.
 */
enum KgzStatus kgz_simulation_time(const struct KgzSimulation *sim, double *time);

/**
 * Number of grid points, or 0 for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
uintptr_t kgz_simulation_num_points(const struct KgzSimulation *sim);

/**
 * Copies the grid nodes and the physical samples of `z`, `n` and `dn/dt`
 * into caller buffers of length `len`, which must equal the number of grid
 * points. Any of the four buffers may be null to skip it.
 *
 * # Safety
 * `sim` must be a live handle; each non-null buffer must hold `len` doubles.
 */
enum KgzStatus kgz_simulation_fields(const struct KgzSimulation *sim,
                                     double *x,
                                     double *z,
                                     double *n,
                                     double *ndot,
                                     uintptr_t len);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `sim` must be null or a handle from this library that has not been freed.
 */
void kgz_simulation_free(struct KgzSimulation *sim);

/**
 * Least-squares slope of `log y` against `log x` over `len` points.
 *
 * # Safety
 * `x` and `y` must point to `len` readable doubles and `slope` to one
 * writable double.
 */
enum KgzStatus kgz_fit_slope(const double *x, const double *y, uintptr_t len, double *slope);

/**
 * Copies the last error message of this thread, NUL-terminated and
 * truncated to `len` bytes, into `buf`. Returns the full message length
 * plus one, so a caller can size the buffer; `buf` may be null to query it.
 *
 * # Safety
 * A non-null `buf` must hold `len` writable bytes.
 */
uintptr_t kgz_last_error_message(char *buf, uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KGZ_H */
