#ifndef TROPMEDIAN_H
#define TROPMEDIAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum TmStatus {
  TM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TM_STATUS_NULL_POINTER = 1,
  /**
   * Arguments are malformed: bad sizes, text that is not UTF-8, parse errors.
   */
  TM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The input is well formed but rejected by the computation.
   */
  TM_STATUS_DOMAIN_ERROR = 3,
  /**
   * A bug in the library; the message has details.
   */
  TM_STATUS_INTERNAL = 4,
} TmStatus;

/**
 * A Fermat–Weber polytrope.
 */
typedef struct TmPolytrope TmPolytrope;

/**
 * A site matrix with optional multiplicities.
 */
typedef struct TmSites TmSites;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *tm_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void tm_string_free(char *s);

/**
 * Builds sites from an `m × n` row-major matrix of integers.
 *
 * # Safety
 * `values` must point to `m * n` readable integers; `out` must be writable.
 */
enum TmStatus tm_sites_from_i64(const int64_t *values, size_t m, size_t n, struct TmSites **out);

/**
 * Parses sites from comma- or tab-separated text with exact decimal or
 * `p/q` entries, one site per line.
 *
 * # Safety
 * `csv` must be a NUL-terminated string; `out` must be writable.
 */
enum TmStatus tm_sites_from_text(const char *csv, struct TmSites **out);

/**
 * Replaces the multiplicities; `count` must equal the number of sites.
 *
 * # Safety
 * `sites` must be a live handle; `weights` must point to `count` integers.
 */
enum TmStatus tm_sites_set_weights(struct TmSites *sites, const uint64_t *weights, size_t count);

/**
 * Number of sites and coordinates.
 *
 * # Safety
 * `sites` must be a live handle; `m` and `n` must be writable.
 */
enum TmStatus tm_sites_shape(const struct TmSites *sites, size_t *m, size_t *n);

/**
 * # Safety
 * `sites` must be null or a live handle, not used afterwards.
 */
void tm_sites_free(struct TmSites *sites);

/**
 * One Fermat–Weber point as space-separated exact coordinates with
 * coordinate sum zero. Free the string with [`tm_string_free`].
 *
 * # Safety
 * `sites` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_fw_point(const struct TmSites *sites, char **out);

/**
 * The full Fermat–Weber polytrope.
 *
 * # Safety
 * `sites` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_fw_polytrope(const struct TmSites *sites, struct TmPolytrope **out);

/**
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_polytrope_dimension(const struct TmPolytrope *p, size_t *out);

/**
 * Number of distinct tropical vertices.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_polytrope_vertex_count(const struct TmPolytrope *p, size_t *out);

/**
 * Whether the integer point `x` (length `n`) lies in the polytrope.
 *
 * # Safety
 * `p` must be a live handle; `x` must point to `n` integers; `out` must be writable.
 */
enum TmStatus tm_polytrope_contains_i64(const struct TmPolytrope *p,
                                        const int64_t *x,
                                        size_t n,
                                        bool *out);

/**
 * Bounds, tropical vertices, dimension and optimal value as JSON.
 *
 * # Safety
 * `p` must be a live handle; `out` must be writable.
 */
enum TmStatus tm_polytrope_json(const struct TmPolytrope *p, char **out);

/**
 * # Safety
 * `p` must be null or a live handle, not used afterwards.
 */
void tm_polytrope_free(struct TmPolytrope *p);

/**
 * Tropical median consensus of the Newick trees in `trees` (one per line,
 * `#` comments allowed). `weights` may be null when `weight_count` is 0.
 * The canonical Newick result is written to `out`.
 *
 * # Safety
 * `trees` must be a NUL-terminated string; `weights` must point to
 * `weight_count` integers; `out` must be writable.
 */
enum TmStatus tm_consensus(const char *trees,
                           const uint64_t *weights,
                           size_t weight_count,
                           bool adjust_equidistant,
                           char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TROPMEDIAN_H */
