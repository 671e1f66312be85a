#ifndef ADK_H
#define ADK_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Target model of [`adk_instance_convert`].
 */
typedef enum AdkModel {
  ADK_MODEL_THRESHOLD = 0,
  ADK_MODEL_TRIGGERING = 1,
} AdkModel;

/**
 * Result code of every fallible call.
 */
typedef enum AdkStatus {
  ADK_STATUS_OK = 0,
  ADK_STATUS_NULL_POINTER = 1,
  ADK_STATUS_INVALID_ARGUMENT = 2,
  ADK_STATUS_PARSE = 3,
  ADK_STATUS_BUDGET = 4,
  ADK_STATUS_NOT_AD_INFINITY = 5,
  ADK_STATUS_NOT_DAG = 6,
  ADK_STATUS_DISTRIBUTION = 7,
  ADK_STATUS_PANIC = 8,
} AdkStatus;

/**
 * Opaque threshold or triggering instance.
 */
typedef struct AdkInstance AdkInstance;

/**
 * Opaque set function over a ground set of at most 20 elements.
 */
typedef struct AdkSetFunction AdkSetFunction;

/**
 * Outcome of [`adk_setfn_check`]. The witness fields are zero when `holds`.
 */
typedef struct AdkCheck {
  bool holds;
  /**
   * Largest difference order actually examined.
   */
  uint32_t checked_k;
  uint32_t witness_s;
  uint32_t witness_a;
} AdkCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Most recent error message on this thread, or null. Valid until the next
 * failing call on the same thread.
 */
const char *adk_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *adk_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void adk_string_free(char *s);

/**
 * Builds a set function from `2^n` values `numerators[i] / denominators[i]`,
 * indexed by subset bitmask.
 *
 * # Safety
 * Both arrays must hold `2^n` readable elements; `out` must be writable.
 */
AdkStatus adk_setfn_new(size_t n,
                        const int64_t *numerators,
                        const int64_t *denominators,
                        AdkSetFunction **out);

/**
 * # Safety
 * `f` must be null or a handle from [`adk_setfn_new`] not yet freed.
 */
void adk_setfn_free(AdkSetFunction *f);

/**
 * Ground set size, or 0 for a null handle.
 *
 * # Safety
 * `f` must be null or a live handle.
 */
size_t adk_setfn_ground_size(const AdkSetFunction *f);

/**
 * Writes the difference of `f` over `A` at `S` as a `"p/q"` string to `out`; zero when `A` and `S` overlap.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
AdkStatus adk_setfn_difference(const AdkSetFunction *f, uint32_t a, uint32_t s, char **out);

/**
 * Checks the alternating-difference condition up to order `k`; `k = 0`
 * means every order.
 *
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
AdkStatus adk_setfn_check(const AdkSetFunction *f, uint32_t k, AdkCheck *out);

/**
 * Parses an instance in the text file format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
AdkStatus adk_instance_parse(const char *text, AdkInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle from this library not yet freed.
 */
void adk_instance_free(AdkInstance *inst);

/**
 * Node count, or 0 for a null handle.
 *
 * # Safety
 * `inst` must be null or a live handle.
 */
size_t adk_instance_node_count(const AdkInstance *inst);

/**
 * Model of the instance.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
AdkStatus adk_instance_model(const AdkInstance *inst, AdkModel *out);

/**
 * Canonical text form of the instance.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
AdkStatus adk_instance_serialize(const AdkInstance *inst, char **out);

/**
 * Converts to the requested model as a new handle. Threshold to triggering
 * fails with [`AdkStatus::NotAdInfinity`] when no equivalent exists.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
AdkStatus adk_instance_convert(const AdkInstance *inst, AdkModel to, AdkInstance **out);

/**
 * Exact expected spread of the seed bitmask as a `"p/q"` string. `budget`
 * caps the enumeration size; 0 selects the default.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
AdkStatus adk_exact_spread(const AdkInstance *inst, uint64_t seeds, uint64_t budget, char **out);

/**
 * Monte Carlo estimate of the spread; deterministic in `seed`.
 *
 * # Safety
 * `inst` must be a live handle; `mean` and `std_error` must be writable.
 */
AdkStatus adk_monte_carlo_spread(const AdkInstance *inst,
                                 uint64_t seeds,
                                 uint64_t trials,
                                 uint64_t seed,
                                 double *mean,
                                 double *std_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADK_H */
