#ifndef IFSLAB_H
#define IFSLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum IfslabStatus {
  IFSLAB_STATUS_OK = 0,
  IFSLAB_STATUS_NULL_POINTER = 1,
  IFSLAB_STATUS_INVALID_ARGUMENT = 2,
  IFSLAB_STATUS_PARSE = 3,
  IFSLAB_STATUS_DIMENSION_MISMATCH = 4,
  IFSLAB_STATUS_NOT_CONVERGED = 5,
  IFSLAB_STATUS_BUFFER_TOO_SMALL = 6,
  IFSLAB_STATUS_CHECK_FAILED = 7,
  IFSLAB_STATUS_INTERNAL = 8,
} IfslabStatus;

/**
 * A finite set of points in R^m, stored row-major.
 */
typedef struct IfslabCloud IfslabCloud;

/**
 * An iterated function system parsed from a TOML description.
 */
typedef struct IfslabIfs IfslabIfs;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *ifslab_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *ifslab_status_name(enum IfslabStatus status);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ifslab_string_free(char *s);

/**
 * Parses a TOML system description.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum IfslabStatus ifslab_ifs_from_toml(const char *toml, struct IfslabIfs **out);

/**
 * # Safety
 * `ifs` must come from `ifslab_ifs_from_toml` and not have been freed.
 */
void ifslab_ifs_free(struct IfslabIfs *ifs);

/**
 * Ambient dimension, or 0 for a null handle.
 *
 * # Safety
 * `ifs` must be null or a live handle.
 */
size_t ifslab_ifs_dimension(const struct IfslabIfs *ifs);

/**
 * Number of maps, or 0 for a null handle.
 *
 * # Safety
 * `ifs` must be null or a live handle.
 */
size_t ifslab_ifs_map_count(const struct IfslabIfs *ifs);

/**
 * Iterates from the configured seed. A cloud is returned even when the
 * iteration did not converge; `converged` reports which.
 *
 * # Safety
 * `ifs` must be a live handle; `out` and `converged` must be writable.
 */
enum IfslabStatus ifslab_ifs_attractor(const struct IfslabIfs *ifs,
                                       struct IfslabCloud **out,
                                       bool *converged);

/**
 * Writes the point coded by an address such as `"0|1"` into `out`.
 *
 * # Safety
 * `ifs` must be a live handle, `address` NUL-terminated, `out` writable for `out_len` doubles.
 */
enum IfslabStatus ifslab_ifs_address_point(const struct IfslabIfs *ifs,
                                           const char *address,
                                           double *out,
                                           size_t out_len);

/**
 * Writes the fixed point of the composition along a word such as `"0.1"` into `out`.
 *
 * # Safety
 * `ifs` must be a live handle, `word` NUL-terminated, `out` writable for `out_len` doubles.
 */
enum IfslabStatus ifslab_ifs_fixed_point(const struct IfslabIfs *ifs,
                                         const char *word,
                                         double *out,
                                         size_t out_len);

/**
 * Random-iteration orbit from the origin, deterministic in `seed`.
 *
 * # Safety
 * `ifs` must be a live handle; `out` must be writable.
 */
enum IfslabStatus ifslab_ifs_chaos_game(const struct IfslabIfs *ifs,
                                        size_t steps,
                                        size_t burn_in,
                                        uint64_t seed,
                                        struct IfslabCloud **out);

/**
 * Runs the comma-separated checks (or `"all"`). `report` receives one
 * `CHECK ...` line per result, to be released with `ifslab_string_free`.
 * Returns `CheckFailed` when any check fails.
 *
 * # Safety
 * `ifs` must be a live handle, `checks` NUL-terminated, `report` writable.
 */
enum IfslabStatus ifslab_ifs_verify(const struct IfslabIfs *ifs,
                                    const char *checks,
                                    uint64_t seed,
                                    char **report);

/**
 * Copies `n_points × dimension` row-major coordinates into a new cloud.
 *
 * # Safety
 * `coords` must be readable for `n_points * dimension` doubles; `out` writable.
 */
enum IfslabStatus ifslab_cloud_new(size_t dimension,
                                   const double *coords,
                                   size_t n_points,
                                   struct IfslabCloud **out);

/**
 * # Safety
 * `cloud` must come from this library and not have been freed.
 */
void ifslab_cloud_free(struct IfslabCloud *cloud);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `cloud` must be null or a live handle.
 */
size_t ifslab_cloud_len(const struct IfslabCloud *cloud);

/**
 * # Safety
 * `cloud` must be null or a live handle.
 */
size_t ifslab_cloud_dimension(const struct IfslabCloud *cloud);

/**
 * Row-major coordinates, valid while the cloud lives.
 *
 * # Safety
 * `cloud` must be null or a live handle.
 */
const double *ifslab_cloud_data(const struct IfslabCloud *cloud);

/**
 * Hausdorff distance between two clouds of equal dimension.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum IfslabStatus ifslab_hausdorff(const struct IfslabCloud *a,
                                   const struct IfslabCloud *b,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IFSLAB_H */
