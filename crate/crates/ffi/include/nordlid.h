#ifndef NORDLID_H
#define NORDLID_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Bit for Danish in label masks.
 */
#define NORDLID_LABEL_DA 1

/**
 * Bit for Norwegian Bokmål.
 */
#define NORDLID_LABEL_NB (1 << 1)

/**
 * Bit for Norwegian Nynorsk.
 */
#define NORDLID_LABEL_NN (1 << 2)

/**
 * Bit for Swedish.
 */
#define NORDLID_LABEL_SV (1 << 3)

/**
 * Bit for any other language. Never combined with the others.
 */
#define NORDLID_LABEL_OTHER (1 << 4)

typedef enum NordlidStatus {
  NORDLID_STATUS_OK = 0,
  NORDLID_STATUS_NULL_POINTER = 1,
  NORDLID_STATUS_INVALID_UTF8 = 2,
  NORDLID_STATUS_IO = 3,
  /**
   * Bad magic, unsupported version or malformed header.
   */
  NORDLID_STATUS_BAD_FORMAT = 4,
  NORDLID_STATUS_CHECKSUM = 5,
  /**
   * A string contained an interior NUL byte.
   */
  NORDLID_STATUS_INTERIOR_NUL = 6,
  NORDLID_STATUS_PANIC = 7,
} NordlidStatus;

/**
 * Opaque model handle.
 */
typedef struct NordlidModel NordlidModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Load a model file. On success `*out` receives a handle to release with
 * [`nordlid_model_free`].
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum NordlidStatus nordlid_model_load(const char *path, struct NordlidModel **out);

/**
 * Load a model from an in-memory copy of a model file.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` must be valid.
 */
enum NordlidStatus nordlid_model_load_bytes(const uint8_t *data,
                                            size_t len,
                                            struct NordlidModel **out);

/**
 * Release a model handle. NULL is ignored.
 *
 * # Safety
 * `model` must come from a load function and not be used afterwards.
 */
void nordlid_model_free(struct NordlidModel *model);

/**
 * Predict the label set of `text` as a bitmask of `NORDLID_LABEL_*`.
 * `top1`, if not NULL, receives the index (0 da, 1 nb, 2 nn, 3 sv,
 * 4 other) of the single most likely label.
 *
 * # Safety
 * `model` must be a live handle, `text` a NUL-terminated string and
 * `labels` a valid pointer.
 */
enum NordlidStatus nordlid_predict(const struct NordlidModel *model,
                                   const char *text,
                                   uint8_t *labels,
                                   uint32_t *top1);

/**
 * Predict labels as a comma-separated string such as `"da,nb"`.
 *
 * # Safety
 * As [`nordlid_predict`]; `out` must be a valid pointer.
 */
enum NordlidStatus nordlid_predict_labels(const struct NordlidModel *model,
                                          const char *text,
                                          char **out);

/**
 * Per-language probabilities in the order da, nb, nn, sv.
 *
 * # Safety
 * `probs` must point to space for four doubles.
 */
enum NordlidStatus nordlid_predict_proba(const struct NordlidModel *model,
                                         const char *text,
                                         double *probs);

/**
 * Decision threshold stored in the model, or NaN for a NULL handle.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
double nordlid_model_threshold(const struct NordlidModel *model);

/**
 * Apply training-time normalization (placeholders and lowercasing).
 *
 * # Safety
 * `text` must be NUL-terminated and `out` a valid pointer.
 */
enum NordlidStatus nordlid_normalize(const char *text, char **out);

/**
 * Whether two strings are equal after NFC and whitespace folding.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated and `equal` a valid pointer.
 */
enum NordlidStatus nordlid_canonical_compare(const char *a, const char *b, bool *equal);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void nordlid_string_free(char *s);

/**
 * Message for the last failure on this thread, or NULL. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *nordlid_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nordlid_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NORDLID_H */
