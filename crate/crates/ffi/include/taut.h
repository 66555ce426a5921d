#ifndef TAUT_H
#define TAUT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TautStatus {
  TAUT_STATUS_OK = 0,
  TAUT_STATUS_NULL_POINTER = 1,
  TAUT_STATUS_INVALID_INPUT = 2,
  TAUT_STATUS_PARSE = 3,
  TAUT_STATUS_BELOW_THRESHOLD = 4,
  TAUT_STATUS_INTERPOLATION = 5,
  TAUT_STATUS_ELIMINATION = 6,
  TAUT_STATUS_INTEGRITY = 7,
  TAUT_STATUS_DEFECT = 8,
  TAUT_STATUS_IO = 9,
  TAUT_STATUS_PANIC = 10,
} TautStatus;

/**
 * A tautological class with rational coefficients.
 */
typedef struct TautClassHandle TautClassHandle;

/**
 * A boundary-expression engine with its caches and optional database.
 */
typedef struct TautEliminator TautEliminator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the last failure on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *taut_last_error(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library or be null.
 */
void taut_string_free(char *s);

/**
 * # Safety
 * `c` must come from this library or be null.
 */
void taut_class_free(struct TautClassHandle *c);

/**
 * The monomial given as text (e.g. `psi1^2*kappa1`) on M̄_{g,n}.
 *
 * # Safety
 * `monomial` must be a NUL-terminated string; `out` must be writable.
 */
enum TautStatus taut_class_monomial(uint32_t g,
                                    uint32_t n,
                                    const char *monomial,
                                    struct TautClassHandle **out);

/**
 * Reads a class from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TautStatus taut_class_from_json(const char *json, struct TautClassHandle **out);

/**
 * Writes the JSON form of `c`; free the result with `taut_string_free`.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum TautStatus taut_class_to_json(const struct TautClassHandle *c, char **out);

/**
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum TautStatus taut_class_num_terms(const struct TautClassHandle *c, uintptr_t *out);

/**
 * Sets `*out` to whether the two classes are equal term by term.
 *
 * # Safety
 * `a` and `b` must be live handles; `out` must be writable.
 */
enum TautStatus taut_class_equal(const struct TautClassHandle *a,
                                 const struct TautClassHandle *b,
                                 bool *out);

/**
 * Pixton's class Ω_{g,A} through `max_degree`; `r_samples` = 0 picks the
 * sample count from the degree bound.
 *
 * # Safety
 * `a` must point to `n` integers; `out` must be writable.
 */
enum TautStatus taut_omega(uint32_t g,
                           const int64_t *a,
                           uintptr_t n,
                           uint32_t max_degree,
                           uintptr_t r_samples,
                           struct TautClassHandle **out);

/**
 * The a-monomial coefficient of the DR relation on M̄_{g,N} (N =
 * `legs`), multiplied by the ψ-monomial `multiplier` and pushed forward
 * along the map forgetting `forget`.
 *
 * # Safety
 * `m` must hold `legs - 1` exponents, `multiplier` `legs` exponents and
 * `forget` `forget_len` labels; `out` must be writable.
 */
enum TautStatus taut_dr_relation(uint32_t g,
                                 uintptr_t legs,
                                 const uint32_t *m,
                                 const uint32_t *multiplier,
                                 const uint32_t *forget,
                                 uintptr_t forget_len,
                                 struct TautClassHandle **out);

/**
 * A new engine; `db_path` may be null for no database.
 *
 * # Safety
 * `db_path` must be null or NUL-terminated; `out` must be writable.
 */
enum TautStatus taut_eliminator_new(const char *db_path, struct TautEliminator **out);

/**
 * # Safety
 * `e` must come from this library or be null.
 */
void taut_eliminator_free(struct TautEliminator *e);

/**
 * A boundary expression for the monomial on M̄_{g,n}.
 *
 * # Safety
 * `e` must be a live engine, `monomial` NUL-terminated, `out` writable.
 */
enum TautStatus taut_boundary_expression(struct TautEliminator *e,
                                         uint32_t g,
                                         uint32_t n,
                                         const char *monomial,
                                         struct TautClassHandle **out);

/**
 * Rewrites `c` until every stratum has property ⋆.
 *
 * # Safety
 * `e` and `c` must be live handles; `out` must be writable.
 */
enum TautStatus taut_theorem_star_reduce(struct TautEliminator *e,
                                         const struct TautClassHandle *c,
                                         struct TautClassHandle **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAUT_H */
