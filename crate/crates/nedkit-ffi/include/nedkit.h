/* C interface for the nedkit named-entity disambiguation engine. */

#ifndef NEDKIT_H
#define NEDKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a C-ABI call. Anything but `Ok` leaves a message in
 * [`ned_last_error`].
 */
typedef enum NedStatus {
  NED_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  NED_STATUS_NULL_ARGUMENT = 1,
  /**
   * An input string was not valid UTF-8.
   */
  NED_STATUS_INVALID_UTF8 = 2,
  /**
   * The request itself was malformed (bad JSON, empty document, bad
   * config values).
   */
  NED_STATUS_INVALID_INPUT = 3,
  NED_STATUS_TIMEOUT = 4,
  /**
   * The KB or index could not be loaded or is internally inconsistent.
   */
  NED_STATUS_DATA_ERROR = 5,
  /**
   * A panic was caught at the boundary; the engine is still usable.
   */
  NED_STATUS_PANIC = 6,
} NedStatus;

/**
 * Opaque engine handle: a loaded KB plus its search index and the
 * strategy defaults.
 */
typedef struct NedEngine NedEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Opens an engine over the KB dump at `kb_path`. A null `index_path`
 * builds the search index in memory; otherwise the index is loaded from
 * that file. On `Ok` the caller owns `*out` and must release it with
 * [`ned_engine_free`].
 *
 * # Safety
 * `kb_path` and `index_path` must be null or valid nul-terminated
 * strings; `out` must point to writable memory.
 */
enum NedStatus ned_engine_open(const char *kb_path, const char *index_path, struct NedEngine **out);

/**
 * Releases an engine. A null pointer is a no-op.
 *
 * # Safety
 * `engine` must be null or a pointer from [`ned_engine_open`] that has
 * not been freed yet.
 */
void ned_engine_free(struct NedEngine *engine);

/**
 * Number of entities in the engine's KB. Returns 0 for a null engine.
 *
 * # Safety
 * `engine` must be null or a live pointer from [`ned_engine_open`].
 */
size_t ned_entity_count(const struct NedEngine *engine);

/**
 * Annotates `text` with entity links using the graph strategy and stores
 * a newly allocated string in `*out`. Release it with
 * [`ned_string_free`].
 *
 * # Safety
 * `engine` must be a live pointer from [`ned_engine_open`]; `text` must
 * be a valid nul-terminated string; `out` must point to writable memory.
 */
enum NedStatus ned_annotate(const struct NedEngine *engine, const char *text, char **out);

/**
 * Disambiguates one request given as a JSON object: `text` (required),
 * `strategy` (`"graph"` or `"topic"`, default graph), `name` and `seed`
 * (topic strategy only), and `timeout_s` (no deadline when missing).
 * Stores the serialized result in `*out` as JSON with `query_id`,
 * `ranked` label/score pairs, and per-mention `annotations` when the
 * strategy produces them. Release `*out` with [`ned_string_free`].
 *
 * # Safety
 * `engine` must be a live pointer from [`ned_engine_open`];
 * `request_json` must be a valid nul-terminated string; `out` must point
 * to writable memory.
 */
enum NedStatus ned_query(const struct NedEngine *engine, const char *request_json, char **out);

/**
 * Releases a string produced by this library. A null pointer is a no-op.
 *
 * # Safety
 * `s` must be null or a string from this library that has not been freed
 * yet.
 */
void ned_string_free(char *s);

/**
 * Message for the most recent failure on the calling thread, or null if
 * none. The pointer stays valid until the next failing call on the same
 * thread; do not free it.
 */
const char *ned_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEDKIT_H */
