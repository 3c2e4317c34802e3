#ifndef SPARSE_MEMBERSHIP_H
#define SPARSE_MEMBERSHIP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the first four match the command-line exit codes.
 */
typedef enum SmStatus {
  SM_STATUS_OK = 0,
  /**
   * Infeasible, false, or a failed hypothesis.
   */
  SM_STATUS_FALSE = 1,
  /**
   * Undecided within the Gröbner budget.
   */
  SM_STATUS_UNKNOWN = 2,
  SM_STATUS_INPUT_ERROR = 3,
  SM_STATUS_NULL_ARGUMENT = 4,
  SM_STATUS_PANIC = 5,
} SmStatus;

/**
 * A parsed problem.
 */
typedef struct SmProblem SmProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a problem file given as JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SmStatus sm_problem_new(const char *json, struct SmProblem **out);

/**
 * # Safety
 * `p` must come from [`sm_problem_new`] and not be used afterwards.
 */
void sm_problem_free(struct SmProblem *p);

/**
 * Sets the Gröbner pair budget for later calls on this problem.
 *
 * # Safety
 * `p` must be a live problem handle.
 */
enum SmStatus sm_problem_set_budget(struct SmProblem *p, uintptr_t budget);

/**
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum SmStatus sm_analyze(const struct SmProblem *p, char **out);

/**
 * Bound certificates; `theorems` is NULL or a comma-separated list.
 *
 * # Safety
 * `p` must be a live problem handle, `theorems` NULL or NUL-terminated, `out` valid.
 */
enum SmStatus sm_bounds(const struct SmProblem *p, const char *theorems, char **out);

/**
 * Solves at a certificate (JSON text) or, when NULL, at the smallest certified Q.
 *
 * # Safety
 * `p` must be a live problem handle, `certificate` NULL or NUL-terminated, `out` valid.
 */
enum SmStatus sm_solve(const struct SmProblem *p, const char *certificate, char **out);

/**
 * Solves at `Q = c·P` with exponent `nu`.
 *
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum SmStatus sm_solve_scaled(const struct SmProblem *p, uint32_t nu, int64_t c, char **out);

/**
 * Checks a solution document (`G`, `nu`, `Q.vertices`).
 *
 * # Safety
 * `p` must be a live problem handle, `solution` NUL-terminated, `out` valid.
 */
enum SmStatus sm_verify(const struct SmProblem *p, const char *solution, char **out);

/**
 * # Safety
 * `p` must be a live problem handle and `out` a valid pointer.
 */
enum SmStatus sm_check_infinity(const struct SmProblem *p, char **out);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed at most once.
 */
void sm_string_free(char *s);

/**
 * Message for the last failed call on this thread; valid until the next call.
 */
const char *sm_last_error(void);

/**
 * Library version as a static string.
 */
const char *sm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPARSE_MEMBERSHIP_H */
