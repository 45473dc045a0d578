/* C interface to lexfact. Generated by cbindgen; do not edit. */

#ifndef LEXFACT_H
#define LEXFACT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum LexfactStatus {
  /**
   * The call succeeded.
   */
  LEXFACT_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LEXFACT_STATUS_NULL_ARGUMENT = 1,
  /**
   * Instance construction failed: no generators, a zero generator, or
   * `element + max(generator)` does not fit in 64 bits.
   */
  LEXFACT_STATUS_INVALID_INSTANCE = 2,
  /**
   * A vector length did not match the instance dimension.
   */
  LEXFACT_STATUS_BAD_LENGTH = 3,
  /**
   * A pool configuration field that must be positive was zero.
   */
  LEXFACT_STATUS_INVALID_CONFIG = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  LEXFACT_STATUS_PANIC = 5,
} LexfactStatus;

/**
 * Modulo-skip selection for candidate stepping.
 */
typedef enum LexfactModulo {
  /**
   * Enabled for dimension >= 4, disabled otherwise.
   */
  LEXFACT_MODULO_AUTO = 0,
  /**
   * Always enabled.
   */
  LEXFACT_MODULO_ON = 1,
  /**
   * Always disabled.
   */
  LEXFACT_MODULO_OFF = 2,
} LexfactModulo;

/**
 * Opaque problem instance: the element and its generators.
 */
typedef struct LexfactInstance LexfactInstance;

/**
 * Opaque bounded candidate stream. Owns a copy of its instance.
 */
typedef struct LexfactStream LexfactStream;

/**
 * Worker pool sizing; take `lexfact_pool_config_default()` and adjust.
 */
typedef struct LexfactPoolConfig {
  /**
   * Worker slots; 0 means available hardware parallelism.
   */
  size_t workers;
  /**
   * Per-worker buffer capacity in factorizations; must be positive.
   */
  size_t buffer_capacity;
  /**
   * Candidate steps between redistribution barriers; must be positive.
   */
  size_t steps_between_splits;
  /**
   * Modulo-skip selection.
   */
  enum LexfactModulo modulo;
} LexfactPoolConfig;

/**
 * Per-factorization callback for `lexfact_for_each`: receives the
 * coordinates (valid only during the call), their length, and the caller's
 * context pointer. Called from the thread that called `lexfact_for_each`.
 */
typedef void (*LexfactVisitor)(const uint64_t *factorization, size_t dimension, void *user_data);

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates an instance for element `element` over `generator_count`
 * generators read from `generators`. On success writes the new handle to
 * `out_instance`; free it with `lexfact_instance_free`.
 *
 * # Safety
 * `generators` must point to `generator_count` readable values (it may be
 * null only when `generator_count` is 0, which is itself rejected as an
 * invalid instance); `out_instance` must be a valid writable pointer.
 */
enum LexfactStatus lexfact_instance_new(uint64_t element,
                                        const uint64_t *generators,
                                        size_t generator_count,
                                        struct LexfactInstance **out_instance);

/**
 * Frees an instance handle. Null is a no-op. Streams created from the
 * instance stay valid.
 *
 * # Safety
 * `instance` must be a handle from `lexfact_instance_new` not yet freed.
 */
void lexfact_instance_free(struct LexfactInstance *instance);

/**
 * Number of generators (and candidate coordinates); 0 for a null handle.
 *
 * # Safety
 * `instance` must be null or a live handle from `lexfact_instance_new`.
 */
size_t lexfact_instance_dimension(const struct LexfactInstance *instance);

/**
 * The element being factored; 0 for a null handle.
 *
 * # Safety
 * `instance` must be null or a live handle from `lexfact_instance_new`.
 */
uint64_t lexfact_instance_element(const struct LexfactInstance *instance);

/**
 * The default pool configuration: hardware parallelism, buffers of
 * 1000 factorizations, 1024 steps between barriers, automatic modulo skip.
 */
struct LexfactPoolConfig lexfact_pool_config_default(void);

/**
 * Counts all factorizations on a worker pool and writes the total to
 * `out_count`. Memory use is independent of the count.
 *
 * # Safety
 * `instance` must be a live handle; `out_count` must be writable.
 */
enum LexfactStatus lexfact_count(const struct LexfactInstance *instance,
                                 struct LexfactPoolConfig config,
                                 uint64_t *out_count);

/**
 * Enumerates all factorizations on a worker pool, calling `visitor` once
 * per factorization from the calling thread. Arrival order depends on the
 * pool configuration; only the set is guaranteed.
 *
 * # Safety
 * `instance` must be a live handle; `visitor` must be a valid function
 * pointer; `user_data` is passed through untouched.
 */
enum LexfactStatus lexfact_for_each(const struct LexfactInstance *instance,
                                    struct LexfactPoolConfig config,
                                    LexfactVisitor visitor,
                                    void *user_data);

/**
 * Creates a candidate stream over `instance`, walking candidates in
 * strictly decreasing lexicographic order from the greedy first candidate
 * down to the exclusive lower bound.
 *
 * `bound` is the bound vector of length `bound_count`, which must equal the
 * instance dimension; pass null with `bound_count` 0 for the zero bound
 * (the full enumeration). On success writes the handle to `out_stream`;
 * free it with `lexfact_stream_free`. The stream copies what it needs, so
 * freeing the instance later does not invalidate it.
 *
 * # Safety
 * `instance` must be a live handle; `bound` must point to `bound_count`
 * readable values or be null with `bound_count` 0; `out_stream` must be
 * writable.
 */
enum LexfactStatus lexfact_stream_new(const struct LexfactInstance *instance,
                                      const uint64_t *bound,
                                      size_t bound_count,
                                      enum LexfactModulo modulo,
                                      struct LexfactStream **out_stream);

/**
 * Frees a stream handle. Null is a no-op.
 *
 * # Safety
 * `stream` must be a handle from `lexfact_stream_new` not yet freed.
 */
void lexfact_stream_free(struct LexfactStream *stream);

/**
 * Copies the stream's current candidate into `out` (`out_count` must equal
 * the instance dimension). The candidate is meaningful while the stream has
 * not ended; afterwards it is the final candidate visited.
 *
 * # Safety
 * `stream` must be a live handle; `out` must point to `out_count` writable
 * values.
 */
enum LexfactStatus lexfact_stream_candidate(const struct LexfactStream *stream,
                                            uint64_t *out,
                                            size_t out_count);

/**
 * Whether the current candidate is a factorization this stream yields
 * (false once the stream has ended, and for a null handle).
 *
 * # Safety
 * `stream` must be null or a live handle.
 */
bool lexfact_stream_emits(const struct LexfactStream *stream);

/**
 * Whether the stream is exhausted (true for a null handle).
 *
 * # Safety
 * `stream` must be null or a live handle.
 */
bool lexfact_stream_ended(const struct LexfactStream *stream);

/**
 * Steps to the next candidate in decreasing lexicographic order. A no-op
 * once the stream has ended.
 *
 * # Safety
 * `stream` must be a live handle.
 */
enum LexfactStatus lexfact_stream_advance(struct LexfactStream *stream);

/**
 * Steps until the candidate is a factorization to yield, or the stream
 * ends; afterwards either `lexfact_stream_emits` or `lexfact_stream_ended`
 * is true.
 *
 * # Safety
 * `stream` must be a live handle.
 */
enum LexfactStatus lexfact_stream_advance_to_factorization(struct LexfactStream *stream);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEXFACT_H */
