#ifndef NSVERIFY_H
#define NSVERIFY_H

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NsvStatus {
  NSV_STATUS_OK = 0,
  NSV_STATUS_NULL_POINTER = 1,
  NSV_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The scenario violates a well-posedness requirement.
   */
  NSV_STATUS_VALIDATION = 3,
  /**
   * A solve failed, blew up or violated a stability limit.
   */
  NSV_STATUS_NUMERICAL = 4,
  NSV_STATUS_PARSE = 5,
  NSV_STATUS_IO = 6,
  NSV_STATUS_PANIC = 7,
} NsvStatus;

/**
 * Opaque scenario handle.
 */
typedef struct NsvScenario NsvScenario;

/**
 * Opaque handle to a computed trajectory.
 */
typedef struct NsvTrajectory NsvTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next failing call on this thread.
 */
const char *nsv_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *nsv_version(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void nsv_string_free(char *s);

/**
 * Builds a scenario from a preset name or a scenario file path.
 *
 * # Safety
 * `source` must be a nul-terminated string; `out` must be writable.
 */
enum NsvStatus nsv_scenario_load(const char *source, bool auto_project, struct NsvScenario **out);

/**
 * Builds a scenario from TOML text.
 *
 * # Safety
 * `toml` must be a nul-terminated string; `out` must be writable.
 */
enum NsvStatus nsv_scenario_from_toml(const char *toml,
                                      bool auto_project,
                                      struct NsvScenario **out);

/**
 * Grid dimensions of a scenario.
 *
 * # Safety
 * `scenario` must be a live handle; `dims` must point to three writable values.
 */
enum NsvStatus nsv_scenario_dims(const struct NsvScenario *scenario, size_t *dims);

/**
 * # Safety
 * `scenario` must be null or a handle from this library, freed once.
 */
void nsv_scenario_free(struct NsvScenario *scenario);

/**
 * Integrates the scenario, storing every `stride`-th state.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum NsvStatus nsv_run(const struct NsvScenario *scenario,
                       size_t stride,
                       struct NsvTrajectory **out);

/**
 * Number of stored states, or 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t nsv_trajectory_len(const struct NsvTrajectory *traj);

/**
 * Time of stored state `index`.
 *
 * # Safety
 * `traj` must be a live handle; `time` must be writable.
 */
enum NsvStatus nsv_trajectory_time(const struct NsvTrajectory *traj, size_t index, double *time);

/**
 * Copies the velocity of state `index` into `buf` as three consecutive
 * component arrays in grid order (x fastest). `len` must be at least three
 * times the node count.
 *
 * # Safety
 * `traj` must be a live handle; `buf` must hold `len` writable doubles.
 */
enum NsvStatus nsv_trajectory_velocity(const struct NsvTrajectory *traj,
                                       size_t index,
                                       double *buf,
                                       size_t len);

/**
 * # Safety
 * `traj` must be null or a handle from this library, freed once.
 */
void nsv_trajectory_free(struct NsvTrajectory *traj);

/**
 * Evaluates a check (`max_principle`, `coincidence`, `pressure_identity`,
 * `apriori`, `stability`, `energy_residual`) and returns its report as
 * JSON in `*json`. `delta` and `seed` are used by `stability` only.
 *
 * # Safety
 * `traj` must be a live handle, `check` a nul-terminated string and `json`
 * writable. The returned string is freed with [`nsv_string_free`].
 */
enum NsvStatus nsv_check(const struct NsvTrajectory *traj,
                         const char *check,
                         double delta,
                         uint64_t seed,
                         char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NSVERIFY_H */
