/* C interface to the nlab digit-statistics and prime-interpolant library. */

#ifndef NLAB_H
#define NLAB_H

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum NlabStatus {
  /**
   * The call succeeded and outputs are valid.
   */
  NLAB_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  NLAB_STATUS_NULL_POINTER = 1,
  /**
   * Arguments violate a documented precondition.
   */
  NLAB_STATUS_USAGE = 2,
  /**
   * A query reached past the sieved range or a function's domain.
   */
  NLAB_STATUS_OUT_OF_RANGE = 3,
  /**
   * An asymptotic bound was requested below its validity threshold.
   */
  NLAB_STATUS_THRESHOLD = 4,
  /**
   * A certified invariant failed; results must not be trusted.
   */
  NLAB_STATUS_INVARIANT_VIOLATION = 5,
  /**
   * Internal cross-check failure (a bug in the library).
   */
  NLAB_STATUS_INTERNAL = 6,
  /**
   * File or cache problem.
   */
  NLAB_STATUS_IO = 7,
  /**
   * A string argument was not valid UTF-8.
   */
  NLAB_STATUS_INVALID_STRING = 8,
} NlabStatus;

/**
 * Opaque interpolant handle.
 */
typedef struct NlabSvFunction NlabSvFunction;

/**
 * Opaque prime tables handle.
 */
typedef struct NlabTables NlabTables;

/**
 * One log-ratio sample with its two-sided bounds.
 */
typedef struct NlabEtaSample {
  /**
   * Sample point.
   */
  double x;
  /**
   * Sampled log-ratio.
   */
  double value;
  /**
   * Lower bound at `x`.
   */
  double lower;
  /**
   * Upper bound at `x`.
   */
  double upper;
} NlabEtaSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *nlab_version(void);

/**
 * Message for the most recent failure on this thread, or NULL if none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *nlab_last_error_message(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer previously returned through a `char **`
 * output of this library, not yet freed.
 */
void nlab_string_free(char *s);

/**
 * Sieve all primes up to `limit` (inclusive) and return a handle.
 *
 * # Safety
 * `out` must point to writable storage for one pointer.
 */
enum NlabStatus nlab_tables_build(uint64_t limit, struct NlabTables **out);

/**
 * Load tables from a cache file written by [`nlab_tables_save`].
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum NlabStatus nlab_tables_load(const char *path, struct NlabTables **out);

/**
 * Write the tables to a cache file.
 *
 * # Safety
 * `tables` must be a live handle; `path` a NUL-terminated string.
 */
enum NlabStatus nlab_tables_save(const struct NlabTables *tables, const char *path);

/**
 * Release a tables handle.
 *
 * # Safety
 * `tables` must be NULL or a live handle, not yet freed.
 */
void nlab_tables_free(struct NlabTables *tables);

/**
 * Sieve limit of the handle.
 *
 * # Safety
 * `tables` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_tables_limit(const struct NlabTables *tables, uint64_t *out);

/**
 * Number of sieved primes.
 *
 * # Safety
 * `tables` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_tables_prime_count(const struct NlabTables *tables, uint64_t *out);

/**
 * Number of primes `<= x`.
 *
 * # Safety
 * `tables` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_pi(const struct NlabTables *tables, uint64_t x, uint64_t *out);

/**
 * The m-th prime, 1-indexed.
 *
 * # Safety
 * `tables` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_nth_prime(const struct NlabTables *tables, uint64_t m, uint64_t *out);

/**
 * The m-th prime gap `p_{m+1} - p_m`.
 *
 * # Safety
 * `tables` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_gap(const struct NlabTables *tables, uint64_t m, uint64_t *out);

/**
 * Whether `x` is prime.
 *
 * # Safety
 * `tables` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_is_prime(const struct NlabTables *tables, uint64_t x, bool *out);

/**
 * Maximum of `gap / ln^2(p)` over all sieved gaps, and where it occurs.
 *
 * # Safety
 * `tables` must be a live handle; outputs writable or NULL to skip.
 */
enum NlabStatus nlab_cramer_max_ratio(const struct NlabTables *tables,
                                      double *ratio_out,
                                      uint64_t *argmax_out);

/**
 * First `n_digits` digits of the concatenated sequence, as ASCII
 * (0-9, then a-z for bases above 10). `seq` is one of "natural",
 * "square", "floor-sqrt", "primes", "prime-count".
 *
 * # Safety
 * `tables` must be a live handle; `seq` a NUL-terminated string; `out`
 * writable. The result must be freed with [`nlab_string_free`].
 */
enum NlabStatus nlab_prefix_ascii(const struct NlabTables *tables,
                                  const char *seq,
                                  uint32_t base,
                                  uint64_t start,
                                  uint64_t n_digits,
                                  char **out);

/**
 * Occurrences of `needle` in `haystack` (digit strings in `base`),
 * counting overlapping matches.
 *
 * # Safety
 * `haystack` and `needle` must be NUL-terminated strings; `out` writable.
 */
enum NlabStatus nlab_count_overlapping(const char *haystack,
                                       const char *needle,
                                       uint32_t base,
                                       uint64_t *out);

/**
 * Digit frequencies over the concatenation of `entries` entries:
 * `counts_out` must hold `base` slots; slot d receives the count of
 * digit d. `denominator_out` (optional) receives the total digit count.
 *
 * # Safety
 * `tables` must be a live handle; `seq` a NUL-terminated string;
 * `counts_out` an array of at least `base` u64 slots.
 */
enum NlabStatus nlab_digit_frequencies(const struct NlabTables *tables,
                                       const char *seq,
                                       uint32_t base,
                                       uint64_t start,
                                       uint64_t entries,
                                       uint64_t *counts_out,
                                       uint64_t *denominator_out);

/**
 * Build the interpolant over `tables`. `eps` and `delta` are rationals
 * in (0, 1) like "1/25" or "0.04"; NULL selects the default 1/25.
 *
 * # Safety
 * `tables` must be a live handle; `eps`/`delta` NULL or NUL-terminated;
 * `out` writable.
 */
enum NlabStatus nlab_svfun_new(const struct NlabTables *tables,
                               const char *eps,
                               const char *delta,
                               struct NlabSvFunction **out);

/**
 * Release an interpolant handle.
 *
 * # Safety
 * `f` must be NULL or a live handle, not yet freed.
 */
void nlab_svfun_free(struct NlabSvFunction *f);

/**
 * Evaluate the interpolant at `x` (exact internally, rounded to f64).
 *
 * # Safety
 * `f` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_svfun_value(const struct NlabSvFunction *f, double x, double *out);

/**
 * Evaluate the interpolant's derivative at `x`.
 *
 * # Safety
 * `f` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_svfun_derivative(const struct NlabSvFunction *f, double x, double *out);

/**
 * Run the construction checks over intervals `2..=m_max` with `samples`
 * random points from `seed`. `passed_out` receives the overall verdict;
 * the call itself fails only if the checks cannot run.
 *
 * # Safety
 * `f` must be a live handle; `passed_out` writable.
 */
enum NlabStatus nlab_svfun_check(const struct NlabSvFunction *f,
                                 uint64_t m_max,
                                 uint64_t samples,
                                 uint64_t seed,
                                 bool *passed_out);

/**
 * Sample `ln f(x) / ln x` with its sandwich bounds (x >= 60184).
 *
 * # Safety
 * `f` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_eta_value_sample(const struct NlabSvFunction *f,
                                      double x,
                                      struct NlabEtaSample *out);

/**
 * Sample `ln f'(x) / ln x` with its bounds (x >= 5). `big_m` must
 * dominate every sieved gap ratio; see [`nlab_auto_big_m`].
 *
 * # Safety
 * `f` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_eta_derivative_sample(const struct NlabSvFunction *f,
                                           double x,
                                           double big_m,
                                           struct NlabEtaSample *out);

/**
 * Sample the square-root-premise lower-bound log ratio (x >= 3). This
 * bound sinks to -1/2 instead of pinching; it exists to demonstrate that.
 *
 * # Safety
 * `tables` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_eta_sqrt_premise_sample(const struct NlabTables *tables,
                                             double x,
                                             double big_m,
                                             struct NlabEtaSample *out);

/**
 * A constant dominating every sieved gap ratio, for derivative bounds.
 *
 * # Safety
 * `tables` must be a live handle; `out` writable.
 */
enum NlabStatus nlab_auto_big_m(const struct NlabTables *tables, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLAB_H */
