#ifndef SPANCLF_H
#define SPANCLF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SpanclfStatus {
  SPANCLF_STATUS_OK = 0,
  SPANCLF_STATUS_NULL_POINTER = 1,
  SPANCLF_STATUS_INVALID_UTF8 = 2,
  SPANCLF_STATUS_INVALID_ARGUMENT = 3,
  SPANCLF_STATUS_IO = 4,
  SPANCLF_STATUS_FORMAT = 5,
  SPANCLF_STATUS_MANIFEST_MISMATCH = 6,
  SPANCLF_STATUS_BUFFER_TOO_SMALL = 7,
  SPANCLF_STATUS_PANIC = 8,
} SpanclfStatus;

/**
 * Context window used by [`spanclf_expand_span`].
 */
typedef enum SpanclfContextMode {
  SPANCLF_CONTEXT_MODE_NONE = 0,
  SPANCLF_CONTEXT_MODE_SENTENCE = 1,
  SPANCLF_CONTEXT_MODE_SUBSENTENCE = 2,
} SpanclfContextMode;

/**
 * Opaque label manifest.
 */
typedef struct SpanclfManifest SpanclfManifest;

/**
 * Opaque trained model.
 */
typedef struct SpanclfModel SpanclfModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread, or null if
 * the last call succeeded. Owned by the library.
 */
const char *spanclf_last_error_message(void);

/**
 * Create the built-in 14-class manifest.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum SpanclfStatus spanclf_manifest_default(struct SpanclfManifest **out);

/**
 * Load a manifest from a JSON file of `{raw_name, canonical_name}` entries.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum SpanclfStatus spanclf_manifest_load(const char *path, struct SpanclfManifest **out);

/**
 * Number of classes in the manifest, or 0 for a null handle.
 *
 * # Safety
 * `manifest` must be null or a handle from this library.
 */
size_t spanclf_manifest_num_classes(const struct SpanclfManifest *manifest);

/**
 * Canonical name of class `index`, or null when out of range. The string
 * lives as long as the manifest handle.
 *
 * # Safety
 * `manifest` must be null or a handle from this library.
 */
const char *spanclf_manifest_class_name(const struct SpanclfManifest *manifest, size_t index);

/**
 * Release a manifest. Null is ignored.
 *
 * # Safety
 * `manifest` must be null or a handle not yet freed.
 */
void spanclf_manifest_free(struct SpanclfManifest *manifest);

/**
 * Load a saved model, checking that it was trained with `manifest`.
 *
 * # Safety
 * `path` must be a NUL-terminated string, `manifest` a live handle and
 * `out` a valid pointer.
 */
enum SpanclfStatus spanclf_model_load(const char *path,
                                      const struct SpanclfManifest *manifest,
                                      struct SpanclfModel **out);

/**
 * Number of classes the model scores, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a handle from this library.
 */
size_t spanclf_model_num_classes(const struct SpanclfModel *model);

/**
 * Hashed feature dimension of the model, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a handle from this library.
 */
size_t spanclf_model_dim(const struct SpanclfModel *model);

/**
 * Class probabilities for `text`. `out` must hold at least
 * `spanclf_model_num_classes(model)` values.
 *
 * # Safety
 * `model` must be a live handle, `text` a NUL-terminated string and
 * `out` valid for `out_len` writes.
 */
enum SpanclfStatus spanclf_model_predict_proba(const struct SpanclfModel *model,
                                               const char *text,
                                               double *out,
                                               size_t out_len);

/**
 * Most probable class index for `text`; ties go to the lowest index.
 *
 * # Safety
 * `model` must be a live handle, `text` a NUL-terminated string and
 * `out_class` a valid pointer.
 */
enum SpanclfStatus spanclf_model_predict(const struct SpanclfModel *model,
                                         const char *text,
                                         size_t *out_class);

/**
 * Release a model. Null is ignored.
 *
 * # Safety
 * `model` must be null or a handle not yet freed.
 */
void spanclf_model_free(struct SpanclfModel *model);

/**
 * Inverse-frequency class weights normalised to sum to one. Every count
 * must be positive.
 *
 * # Safety
 * `counts` must be valid for `len` reads and `out` for `len` writes.
 */
enum SpanclfStatus spanclf_class_weights(const uint64_t *counts, size_t len, double *out);

/**
 * Widen `[start, end)` (character offsets into `text`) to the enclosing
 * sentence or sub-sentence.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out_start` and `out_end` must
 * be valid pointers.
 */
enum SpanclfStatus spanclf_expand_span(const char *text,
                                       size_t start,
                                       size_t end,
                                       enum SpanclfContextMode mode,
                                       size_t *out_start,
                                       size_t *out_end);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPANCLF_H */
