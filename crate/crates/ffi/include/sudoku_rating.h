#ifndef SUDOKU_RATING_H
#define SUDOKU_RATING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  SR_STATUS_OK = 0,
  SR_STATUS_NULL_POINTER = 1,
  SR_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed puzzle text or inconsistent givens.
   */
  SR_STATUS_PARSE = 3,
  /**
   * The puzzle does not have exactly one solution.
   */
  SR_STATUS_NOT_WELL_POSED = 4,
  /**
   * No solution exists.
   */
  SR_STATUS_UNSOLVABLE = 5,
  SR_STATUS_INVALID_ARGUMENT = 6,
  /**
   * Every relaxation sample hit the enumeration cap.
   */
  SR_STATUS_CAP_EXCEEDED = 7,
  /**
   * Buffer too small; the required size is reported where possible.
   */
  SR_STATUS_BUFFER_TOO_SMALL = 8,
  /**
   * Any other model failure, see the error message.
   */
  SR_STATUS_FAILED = 9,
  SR_STATUS_PANIC = 10,
} SrStatus;

/**
 * Opaque puzzle handle. Create with `sr_grid_parse` or `sr_generate`,
 * release with `sr_grid_free`.
 */
typedef struct SrGrid SrGrid;

/**
 * Relaxation aggregates at one edge-removal count.
 */
typedef struct {
  size_t k;
  double mean_solutions_other;
  double mean_fixed_cells;
  size_t samples;
  size_t samples_capped;
} SrRelaxationMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library from the same thread.
 */
const char *sr_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sr_version(void);

/**
 * Parses 16 or 81 characters (`1`-`9`, with `.` or `0` for empty cells).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
SrStatus sr_grid_parse(const char *text, SrGrid **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `grid` must come from this library and not be used afterwards.
 */
void sr_grid_free(SrGrid *grid);

/**
 * Number of cells (16 or 81), or 0 for null.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
size_t sr_grid_cell_count(const SrGrid *grid);

/**
 * Writes the puzzle line plus a terminating NUL into `buf`. `len` must be
 * at least cell count + 1.
 *
 * # Safety
 * `grid` must be a live handle; `buf` must have `len` writable bytes.
 */
SrStatus sr_grid_to_string(const SrGrid *grid, char *buf, size_t len);

/**
 * Solves the puzzle; the solution is a new handle owned by the caller.
 *
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
SrStatus sr_solve(const SrGrid *grid, SrGrid **out);

/**
 * Counts solutions, saturating at `cap`.
 *
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
SrStatus sr_count_solutions(const SrGrid *grid, uint64_t cap, uint64_t *out);

/**
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
SrStatus sr_is_well_posed(const SrGrid *grid, bool *out);

/**
 * Generates a well-posed puzzle of box size `order` (2 or 3).
 *
 * # Safety
 * `out` must be writable.
 */
SrStatus sr_generate(uint8_t order, uint64_t seed, size_t target_givens, SrGrid **out);

/**
 * Mean refutation cost over `runs` model runs.
 *
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
SrStatus sr_refutation_sum(const SrGrid *grid, size_t runs, uint64_t seed, double *out);

/**
 * Mean branching over the first `k_dep` model steps.
 *
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
SrStatus sr_dependency(const SrGrid *grid, size_t k_dep, size_t runs, uint64_t seed, double *out);

/**
 * Backtrack count of row-major chronological search.
 *
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
SrStatus sr_backtracking(const SrGrid *grid, uint64_t *out);

/**
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
SrStatus sr_givens(const SrGrid *grid, size_t *out);

/**
 * Mean simulated-annealing iterations with default parameters.
 *
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
SrStatus sr_annealing(const SrGrid *grid, size_t runs, uint64_t seed, double *out);

/**
 * # Safety
 * `grid` must be a live handle; `out` must be writable.
 */
SrStatus sr_relaxation_metrics(const SrGrid *grid,
                               size_t k_relax,
                               size_t samples,
                               uint64_t seed,
                               uint64_t cap,
                               SrRelaxationMetrics *out);

/**
 * Pearson correlation of two arrays of length `n`.
 *
 * # Safety
 * `xs` and `ys` must each point to `n` readable doubles; `out` must be
 * writable.
 */
SrStatus sr_pearson(const double *xs, const double *ys, size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUDOKU_RATING_H */
