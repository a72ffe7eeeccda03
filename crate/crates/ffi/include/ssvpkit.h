#ifndef SSVPKIT_H
#define SSVPKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SsvpStatus {
  SSVP_STATUS_OK = 0,
  SSVP_STATUS_NULL_POINTER = 1,
  SSVP_STATUS_INVALID_INPUT = 2,
  SSVP_STATUS_DIMENSION_MISMATCH = 3,
  SSVP_STATUS_DEGENERATE_SPECTRUM = 4,
  SSVP_STATUS_NUMERICAL_BREAKDOWN = 5,
  SSVP_STATUS_AMBIGUOUS_PATTERN = 6,
  SSVP_STATUS_NOT_A_SUPERPATTERN = 7,
  SSVP_STATUS_BORDERLINE_RANK = 8,
  SSVP_STATUS_INFEASIBLE = 9,
  SSVP_STATUS_SSVP_REQUIRED = 10,
  SSVP_STATUS_SSVP_WRT_REQUIRED = 11,
  SSVP_STATUS_NO_CONVERGENCE = 12,
  SSVP_STATUS_TARGET_TOO_FAR = 13,
  SSVP_STATUS_PARSE = 14,
  SSVP_STATUS_IO = 15,
  SSVP_STATUS_BUFFER_TOO_SMALL = 16,
  SSVP_STATUS_PANIC = 17,
} SsvpStatus;

/**
 * Outcome of an SSVP check.
 */
typedef struct SsvpCertificate SsvpCertificate;

/**
 * Dense real matrix.
 */
typedef struct SsvpMatrix SsvpMatrix;

/**
 * Zero-nonzero pattern.
 */
typedef struct SsvpPattern SsvpPattern;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after a success. The
 * pointer stays valid until the next ssvpkit call on this thread.
 */
const char *ssvp_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ssvp_version(void);

/**
 * Copies `rows * cols` row-major entries into a new matrix.
 */
enum SsvpStatus ssvp_matrix_new(size_t rows,
                                size_t cols,
                                const double *data,
                                struct SsvpMatrix **out);

void ssvp_matrix_free(struct SsvpMatrix *m);

/**
 * Writes the row and column counts.
 */
enum SsvpStatus ssvp_matrix_shape(const struct SsvpMatrix *m, size_t *rows, size_t *cols);

/**
 * Copies the row-major entries into `out`, which must hold `rows * cols` values.
 */
enum SsvpStatus ssvp_matrix_data(const struct SsvpMatrix *m, double *out, size_t len);

/**
 * Writes the `min(rows, cols)` singular values, non-increasing, into `out`.
 */
enum SsvpStatus ssvp_singular_values(const struct SsvpMatrix *m, double *out, size_t len);

/**
 * Builds a pattern from `rows * cols` row-major cells; any nonzero byte is a one.
 */
enum SsvpStatus ssvp_pattern_new(size_t rows,
                                 size_t cols,
                                 const uint8_t *cells,
                                 struct SsvpPattern **out);

/**
 * The pattern of a matrix under the default zero tolerance.
 */
enum SsvpStatus ssvp_pattern_of(const struct SsvpMatrix *m, struct SsvpPattern **out);

void ssvp_pattern_free(struct SsvpPattern *p);

enum SsvpStatus ssvp_term_rank(const struct SsvpPattern *p, size_t *out);

/**
 * Checks the SSVP, relative to `wrt` when it is non-null. `exact` selects rational
 * elimination for rational input.
 */
enum SsvpStatus ssvp_check(const struct SsvpMatrix *m,
                           const struct SsvpPattern *wrt,
                           bool exact,
                           struct SsvpCertificate **out);

bool ssvp_certificate_has_ssvp(const struct SsvpCertificate *c);

/**
 * The certificate as a JSON string, released with [`ssvp_string_free`]; null on failure.
 */
char *ssvp_certificate_json(const struct SsvpCertificate *c);

void ssvp_certificate_free(struct SsvpCertificate *c);

void ssvp_string_free(char *s);

/**
 * `n × (n+1)` staircase matrix with the `n` given distinct positive singular values.
 */
enum SsvpStatus ssvp_realize_path(const double *s, size_t n, struct SsvpMatrix **out);

/**
 * 3×3 matrix with the 6-cycle pattern and three singular values given non-increasing.
 * `config` is SolverConfig JSON or null for defaults.
 */
enum SsvpStatus ssvp_realize_c6(const double *s, const char *config_json, struct SsvpMatrix **out);

/**
 * A matrix with pattern `p` and the singular values of `m`, which must have the SSVP.
 */
enum SsvpStatus ssvp_superpattern(const struct SsvpMatrix *m,
                                  const struct SsvpPattern *p,
                                  const char *config_json,
                                  struct SsvpMatrix **out);

/**
 * A matrix with the pattern of `m` and singular values `s` (length `min(rows, cols)`).
 */
enum SsvpStatus ssvp_bifurcate(const struct SsvpMatrix *m,
                               const double *s,
                               size_t n,
                               const char *config_json,
                               struct SsvpMatrix **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSVPKIT_H */
