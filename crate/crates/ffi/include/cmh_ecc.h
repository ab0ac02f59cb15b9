#ifndef CMH_ECC_H
#define CMH_ECC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CmhStatus {
  CMH_STATUS_OK = 0,
  CMH_STATUS_NULL_POINTER = 1,
  CMH_STATUS_INVALID_ARGUMENT = 2,
  CMH_STATUS_LENGTH_MISMATCH = 3,
  CMH_STATUS_DUPLICATE_ID = 4,
  CMH_STATUS_IO = 5,
  CMH_STATUS_FORMAT = 6,
  CMH_STATUS_NO_RELEVANT_ITEMS = 7,
  CMH_STATUS_INTERNAL = 8,
} CmhStatus;

// Opaque exact Hamming index.
typedef struct CmhIndex CmhIndex;

// Opaque trained two-branch model.
typedef struct CmhModel CmhModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *cmh_status_message(enum CmhStatus status);

uint8_t cmh_gf_mul(uint8_t a, uint8_t b);

// # Safety
// `out` must be valid for one write.
enum CmhStatus cmh_gf_inv(uint8_t a, uint8_t *out);

// Systematic encode of `k1 = n1 - 2t` message symbols into `n1` symbols.
//
// # Safety
// `message` must hold `message_len` bytes and `out` `out_len` bytes.
enum CmhStatus cmh_rs_encode(const uint8_t *message,
                             size_t message_len,
                             size_t n1,
                             size_t t,
                             uint8_t *out,
                             size_t out_len);

// Bounded-distance decode of `n1` received symbols. On failure `*failed`
// is 1 and `out` holds the received word unchanged.
//
// # Safety
// `received` and `out` must hold `n1` bytes; `corrected` and `failed`
// must be valid for one write.
enum CmhStatus cmh_rs_decode(const uint8_t *received,
                             size_t n1,
                             size_t t,
                             uint8_t *out,
                             size_t *corrected,
                             uint8_t *failed);

// Snaps a packed code of `len` bytes to the nearest codeword within `t`
// symbols. `*snapped` is 0 when the code was left unchanged.
//
// # Safety
// `code` and `out` must hold `len` bytes; `snapped` must be valid for one
// write.
enum CmhStatus cmh_snap(const uint8_t *code, size_t len, size_t t, uint8_t *out, uint8_t *snapped);

// # Safety
// `a` and `b` must hold `len` bytes; `out` must be valid for one write.
enum CmhStatus cmh_hamming(const uint8_t *a, const uint8_t *b, size_t len, uint32_t *out);

// NDCG@k of a ranked relevance list against all relevance grades.
//
// # Safety
// `ranked` must hold `ranked_len` values, `all` `all_len` values; `out`
// must be valid for one write.
enum CmhStatus cmh_ndcg_at_k(const uint32_t *ranked,
                             size_t ranked_len,
                             const uint32_t *all,
                             size_t all_len,
                             size_t k,
                             double *out);

// New empty index over codes of `code_bits` bits (a positive multiple of
// 8). Returns null on invalid input.
struct CmhIndex *cmh_index_new(size_t code_bits);

// # Safety
// `index` must come from [`cmh_index_new`] and not be freed yet; null is
// ignored.
void cmh_index_free(struct CmhIndex *index);

// # Safety
// `index` must be a live handle and `code` must hold `len` bytes.
enum CmhStatus cmh_index_insert(struct CmhIndex *index,
                                uint64_t id,
                                const uint8_t *code,
                                size_t len);

// Number of stored codes; 0 for a null handle.
//
// # Safety
// `index` must be a live handle or null.
size_t cmh_index_len(const struct CmhIndex *index);

// Exact top-k by (distance, id). Writes up to `k` hits and their count.
//
// # Safety
// `index` must be a live handle, `query` must hold `len` bytes, `ids` and
// `distances` must hold `k` values and `count` must be valid for one write.
enum CmhStatus cmh_index_top_k(const struct CmhIndex *index,
                               const uint8_t *query,
                               size_t len,
                               size_t k,
                               uint64_t *ids,
                               uint32_t *distances,
                               size_t *count);

// Loads a model file written by the training pipeline.
//
// # Safety
// `path` must be a NUL-terminated string and `out` valid for one write.
enum CmhStatus cmh_model_load(const char *path, struct CmhModel **out);

// # Safety
// `model` must come from [`cmh_model_load`] and not be freed yet; null is
// ignored.
void cmh_model_free(struct CmhModel *model);

// # Safety
// `model` must be a live handle or null.
size_t cmh_model_code_bits(const struct CmhModel *model);

// # Safety
// `model` must be a live handle or null.
size_t cmh_model_feature_dim(const struct CmhModel *model);

// # Safety
// `model` must be a live handle or null.
size_t cmh_model_attributes(const struct CmhModel *model);

// Packed image-branch code; `out_len` must equal `code_bits / 8`.
//
// # Safety
// `model` must be a live handle, `features` must hold `n` values and
// `out` `out_len` bytes.
enum CmhStatus cmh_model_encode_image(const struct CmhModel *model,
                                      const double *features,
                                      size_t n,
                                      uint8_t *out,
                                      size_t out_len);

// Packed attribute-branch code from a 0/1 bitmap.
//
// # Safety
// `model` must be a live handle, `attrs` must hold `n` bytes and `out`
// `out_len` bytes.
enum CmhStatus cmh_model_encode_attributes(const struct CmhModel *model,
                                           const uint8_t *attrs,
                                           size_t n,
                                           uint8_t *out,
                                           size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CMH_ECC_H */
