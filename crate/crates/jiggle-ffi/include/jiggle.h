#ifndef JIGGLE_H
#define JIGGLE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum JgStatus {
  JG_STATUS_OK = 0,
  JG_STATUS_NULL_POINTER = 1,
  JG_STATUS_INVALID_UTF8 = 2,
  JG_STATUS_PARSE = 3,
  JG_STATUS_INVALID_INPUT = 4,
  /**
   * The computation ran but its result could not be certified.
   */
  JG_STATUS_VERIFICATION = 5,
  JG_STATUS_PANIC = 6,
} JgStatus;

/**
 * An embedded simplicial complex.
 */
typedef struct JgComplex JgComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *jg_version(void);

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next call into the library on this thread.
 */
const char *jg_last_error_message(void);

/**
 * Parses a complex from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum JgStatus jg_complex_from_json(const char *json, struct JgComplex **out);

/**
 * Releases a complex; null is ignored.
 *
 * # Safety
 * `k` must come from this library and not be used afterwards.
 */
void jg_complex_free(struct JgComplex *k);

/**
 * Crystalline subdivision of level `level` as a new complex.
 *
 * # Safety
 * `k` must be a live handle and `out` a valid pointer.
 */
enum JgStatus jg_complex_subdivide(const struct JgComplex *k,
                                   uint32_t level,
                                   struct JgComplex **out);

/**
 * Number of vertices, 0 for a null handle.
 *
 * # Safety
 * `k` must be null or a live handle.
 */
uintptr_t jg_complex_num_vertices(const struct JgComplex *k);

/**
 * Number of top dimensional simplices, 0 for a null handle.
 *
 * # Safety
 * `k` must be null or a live handle.
 */
uintptr_t jg_complex_num_top_simplices(const struct JgComplex *k);

/**
 * JSON form of a complex, to be released with [`jg_string_free`].
 *
 * # Safety
 * `k` must be a live handle and `out` a valid pointer.
 */
enum JgStatus jg_complex_to_json(const struct JgComplex *k, char **out);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void jg_string_free(char *s);

/**
 * Largest `rmax`, smallest `rmin` and largest `Λ` over the top simplices.
 *
 * # Safety
 * `k` must be a live handle and the out pointers valid.
 */
enum JgStatus jg_complex_metrics(const struct JgComplex *k,
                                 double *out_rmax,
                                 double *out_rmin,
                                 double *out_lambda);

/**
 * Greedy coloring of the top simplices. Writes the number of colors and,
 * when `colors` is non-null, one color per top simplex into `colors`,
 * which must hold [`jg_complex_num_top_simplices`] entries.
 *
 * # Safety
 * `k` must be a live handle, `num_colors` valid, `colors` null or large
 * enough.
 */
enum JgStatus jg_complex_color(const struct JgComplex *k, uintptr_t *num_colors, uintptr_t *colors);

/**
 * Moves a top dimensional triangulation into general position with
 * respect to the distribution given as JSON, within `epsilon`. Returns
 * the moved complex and, when `report` is non-null, a JSON report.
 *
 * # Safety
 * `k` must be a live handle, `xi_json` a NUL-terminated string, `out`
 * valid and `report` null or valid.
 */
enum JgStatus jg_jiggle_triangulation(const struct JgComplex *k,
                                      const char *xi_json,
                                      double epsilon,
                                      struct JgComplex **out,
                                      char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JIGGLE_H */
