#ifndef QTORUS_H
#define QTORUS_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QtStatus {
  QT_STATUS_OK = 0,
  QT_STATUS_NULL_POINTER = 1,
  QT_STATUS_INVALID_UTF8 = 2,
  QT_STATUS_INVALID_ARGUMENT = 3,
  QT_STATUS_NON_UNIMODULAR = 4,
  QT_STATUS_RELATION_VIOLATED = 5,
  QT_STATUS_NOT_INVARIANT = 6,
  QT_STATUS_MALFORMED_FRACTION = 7,
  QT_STATUS_INTERNAL = 8,
  QT_STATUS_PANIC = 9,
} QtStatus;

/**
 * A level `Q(x) = zeta * x^T C x` with its standard braiding refinement.
 */
typedef struct QtLevel QtLevel;

/**
 * A lattice local system on a closed oriented surface.
 */
typedef struct QtLocalSystem QtLocalSystem;

/**
 * Message for the most recent failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *qt_last_error_message(void);

/**
 * Builds a local system from `2 * genus` row-major `rank x rank` matrices laid
 * out consecutively in `monodromy` (`len = 2 * genus * rank * rank`). Passing
 * `len = 0` gives the trivial system.
 *
 * # Safety
 * `monodromy` must point to `len` values; `out` must be writable.
 */
enum QtStatus qt_local_system_new(size_t genus,
                                  size_t rank,
                                  const int64_t *monodromy,
                                  size_t len,
                                  struct QtLocalSystem **out);

/**
 * # Safety
 * `system` must be null or come from `qt_local_system_new`, and not be used afterwards.
 */
void qt_local_system_free(struct QtLocalSystem *system);

/**
 * Free ranks of `H^0`, `H^1`, `H^2` written to `out[0..3]`.
 *
 * # Safety
 * `system` must be a live handle and `out` must point to three writable values.
 */
enum QtStatus qt_cohomology_ranks(const struct QtLocalSystem *system, size_t *out);

/**
 * `H^0`, `H^1`, `H^2` as JSON `{"h0": {"free_rank", "torsion"}, ...}`.
 *
 * # Safety
 * `system` must be a live handle; `out` must be writable. Free the result with
 * `qt_string_free`.
 */
enum QtStatus qt_cohomology_json(const struct QtLocalSystem *system, char **out);

/**
 * # Safety
 * `system` must be a live handle and `out` writable.
 */
enum QtStatus qt_euler_characteristic(const struct QtLocalSystem *system, int64_t *out);

/**
 * Builds the level `zeta * x^T C x` from a row-major `rank x rank` matrix and a
 * reduced fraction string such as `"1/4"`.
 *
 * # Safety
 * `c_matrix` must point to `rank * rank` values, `zeta` must be a NUL-terminated
 * string, and `out` must be writable.
 */
enum QtStatus qt_level_new(size_t rank,
                           const int64_t *c_matrix,
                           const char *zeta,
                           struct QtLevel **out);

/**
 * # Safety
 * `level` must be null or come from `qt_level_new`, and not be used afterwards.
 */
void qt_level_free(struct QtLevel *level);

/**
 * Whether the level is invariant under every monodromy matrix of `system`.
 *
 * # Safety
 * Both handles must be live and `out` writable.
 */
enum QtStatus qt_level_is_invariant(const struct QtLevel *level,
                                    const struct QtLocalSystem *system,
                                    bool *out);

/**
 * Ribbon twist on the grade `lambda`, as the reduced fraction `num/den` in `[0, 1)`.
 *
 * # Safety
 * `level` must be live, `lambda` must point to `len` values, `num`/`den` writable.
 */
enum QtStatus qt_twist(const struct QtLevel *level,
                       const int64_t *lambda,
                       size_t len,
                       uint64_t *num,
                       uint64_t *den);

/**
 * Double braiding `c(l1, l2) c(l2, l1)` as `num/den` in `[0, 1)`.
 *
 * # Safety
 * `level` must be live, `l1` and `l2` must point to `len` values, `num`/`den` writable.
 */
enum QtStatus qt_double_braiding(const struct QtLevel *level,
                                 const int64_t *l1,
                                 const int64_t *l2,
                                 size_t len,
                                 uint64_t *num,
                                 uint64_t *den);

/**
 * Runs a CLI task (`"local"`, `"surface"`, `"global"`, `"bunt"`, `"selfcheck"`)
 * on a JSON job spec. `spec_json` may be null for `selfcheck`. The report (or
 * error object) is written to `out` and the CLI exit status to `exit_code`; the
 * return value is `QT_STATUS_OK` whenever a report was produced.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` and `exit_code` writable.
 */
enum QtStatus qt_run_job(const char *task, const char *spec_json, char **out, int32_t *exit_code);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed at most once.
 */
void qt_string_free(char *s);

#endif  /* QTORUS_H */
