#ifndef CWGABOR_H
#define CWGABOR_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CwgStatus {
  CWG_STATUS_OK = 0,
  CWG_STATUS_NULL_POINTER = 1,
  CWG_STATUS_INVALID_INPUT = 2,
  CWG_STATUS_DIVERGENCE = 3,
  CWG_STATUS_BUDGET_EXCEEDED = 4,
  CWG_STATUS_UNSUPPORTED = 5,
  CWG_STATUS_CONFIG = 6,
  CWG_STATUS_IO = 7,
  CWG_STATUS_PANIC = 8,
} CwgStatus;

/**
 * Opaque PPM(q) over RS(n', k') code.
 */
typedef struct CwgCode CwgCode;

/**
 * Opaque dictionary (Gabor or Gaussian).
 */
typedef struct CwgDictionary CwgDictionary;

/**
 * Opaque Monte-Carlo experiment built from a JSON configuration.
 */
typedef struct CwgExperiment CwgExperiment;

typedef struct CwgCodeParams {
  /**
   * Binary length n' q.
   */
  uint64_t n;
  /**
   * Weight n'.
   */
  uint64_t w;
  /**
   * Maximum pairwise overlap.
   */
  uint64_t d;
  /**
   * Disjunctive order, 0 when the code has no redundancy bound.
   */
  uint64_t p;
  /**
   * Information bits k' log2 q.
   */
  uint64_t b;
  uint64_t q;
  uint64_t sections;
  uint64_t info_sections;
} CwgCodeParams;

typedef struct CwgPointResult {
  double ebn0_db;
  uint64_t trials;
  /**
   * Active users summed over trials.
   */
  uint64_t events;
  uint64_t missed;
  uint64_t false_alarms;
  double pe;
} CwgPointResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *cwg_last_error_message(void);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum CwgStatus cwg_code_new(size_t q, size_t n_prime, size_t k_prime, struct CwgCode **out);

/**
 * # Safety
 * `code` must come from [`cwg_code_new`] and not be used afterwards. Null is ignored.
 */
void cwg_code_free(struct CwgCode *code);

/**
 * # Safety
 * `code` must be a live handle and `out` writable.
 */
enum CwgStatus cwg_code_params(const struct CwgCode *code, struct CwgCodeParams *out);

/**
 * Encodes `info_sections` symbols into `sections` PPM positions.
 *
 * # Safety
 * `message` must hold `message_len` symbols and `positions` room for
 * `positions_len` symbols.
 */
enum CwgStatus cwg_code_encode(const struct CwgCode *code,
                               const uint16_t *message,
                               size_t message_len,
                               uint16_t *positions,
                               size_t positions_len);

/**
 * Truncated Alltop-Gabor frame with `n` rows (prime) and `m` columns.
 *
 * # Safety
 * `out` must be writable.
 */
enum CwgStatus cwg_dictionary_gabor_new(size_t n,
                                        size_t m,
                                        size_t stride,
                                        struct CwgDictionary **out);

/**
 * I.i.d. complex Gaussian dictionary with unit-norm columns.
 *
 * # Safety
 * `out` must be writable.
 */
enum CwgStatus cwg_dictionary_gaussian_new(size_t n,
                                           size_t m,
                                           uint64_t seed,
                                           struct CwgDictionary **out);

/**
 * # Safety
 * `dict` must come from a `cwg_dictionary_*_new` call. Null is ignored.
 */
void cwg_dictionary_free(struct CwgDictionary *dict);

/**
 * # Safety
 * `dict` must be live and both outputs writable.
 */
enum CwgStatus cwg_dictionary_shape(const struct CwgDictionary *dict, size_t *rows, size_t *cols);

/**
 * `y = A x` for `x` of shape `cols x t` and `y` of shape `rows x t`.
 *
 * # Safety
 * `x` must hold `2 * cols * t` doubles and `y` room for `2 * rows * t`.
 */
enum CwgStatus cwg_dictionary_apply(const struct CwgDictionary *dict,
                                    const double *x,
                                    size_t t,
                                    double *y);

/**
 * `x = A^H y` for `y` of shape `rows x t` and `x` of shape `cols x t`.
 *
 * # Safety
 * `y` must hold `2 * rows * t` doubles and `x` room for `2 * cols * t`.
 */
enum CwgStatus cwg_dictionary_adjoint(const struct CwgDictionary *dict,
                                      const double *y,
                                      size_t t,
                                      double *x);

/**
 * # Safety
 * `json` must be a nul-terminated UTF-8 string and `out` writable.
 */
enum CwgStatus cwg_experiment_from_json(const char *json, struct CwgExperiment **out);

/**
 * # Safety
 * `exp` must come from [`cwg_experiment_from_json`]. Null is ignored.
 */
void cwg_experiment_free(struct CwgExperiment *exp);

/**
 * Runs every trial at one Eb/N0 on `threads` workers (0 means one).
 *
 * # Safety
 * `exp` must be live and `out` writable.
 */
enum CwgStatus cwg_experiment_run(const struct CwgExperiment *exp,
                                  double ebn0_db,
                                  size_t threads,
                                  struct CwgPointResult *out);

/**
 * Runs the built-in PPM(8) over RS(6,2) example and stores whether every step matched.
 *
 * # Safety
 * `passed` must be writable.
 */
enum CwgStatus cwg_verify_example(bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CWGABOR_H */
