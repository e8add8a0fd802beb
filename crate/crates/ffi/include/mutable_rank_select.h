#ifndef MUTABLE_RANK_SELECT_H
#define MUTABLE_RANK_SELECT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define MRS_INDEX_SCALAR 0

#define MRS_INDEX_NARROW 1

#define MRS_INDEX_WIDE 2

#define MRS_INDEX_FENWICK 3

typedef enum {
  MRS_STATUS_OK = 0,
  MRS_STATUS_NULL_POINTER = 1,
  MRS_STATUS_OUT_OF_RANGE = 2,
  MRS_STATUS_SELECT_OUT_OF_RANGE = 3,
  MRS_STATUS_CAPACITY = 4,
  MRS_STATUS_UNSUPPORTED_BLOCK = 5,
  MRS_STATUS_DOMAIN = 6,
  MRS_STATUS_FORMAT = 7,
  MRS_STATUS_INVALID_ARGUMENT = 8,
  MRS_STATUS_BUFFER_TOO_SMALL = 9,
  MRS_STATUS_PANIC = 10,
} MrsStatus;

// Opaque bitmap handle.
typedef struct MrsBitmap MrsBitmap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates an all-zero bitmap of `len` bits. `block_bits` is 64, 256 or 512;
// `index` is one of the `MRS_INDEX_*` constants.
//
// # Safety
// `out` must be valid for writes.
MrsStatus mrs_bitmap_new(uint64_t len, uint32_t block_bits, uint32_t index, MrsBitmap **out);

// Creates a bitmap of `len` bits from `ceil(len / 64)` little-endian-bit
// words: bit `i` is bit `i % 64` of `words[i / 64]`. Bits past `len` in the
// last word must be zero.
//
// # Safety
// `words` must point to `n_words` readable words; `out` must be valid for writes.
MrsStatus mrs_bitmap_from_words(const uint64_t *words,
                                size_t n_words,
                                uint64_t len,
                                uint32_t block_bits,
                                uint32_t index,
                                MrsBitmap **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `bm` must be null or a live handle from this library, not used afterwards.
void mrs_bitmap_free(MrsBitmap *bm);

// Number of bits; 0 for a null handle.
//
// # Safety
// `bm` must be null or a live handle.
uint64_t mrs_bitmap_len(const MrsBitmap *bm);

// Number of set bits; 0 for a null handle.
//
// # Safety
// `bm` must be null or a live handle.
uint64_t mrs_bitmap_ones(const MrsBitmap *bm);

// # Safety
// `bm` must be a live handle; `out` must be valid for writes.
MrsStatus mrs_bitmap_access(const MrsBitmap *bm, uint64_t i, bool *out);

// Toggles bit `i`.
//
// # Safety
// `bm` must be a live handle not accessed concurrently.
MrsStatus mrs_bitmap_flip(MrsBitmap *bm, uint64_t i);

// Number of set bits in positions `0..=i`.
//
// # Safety
// `bm` must be a live handle; `out` must be valid for writes.
MrsStatus mrs_bitmap_rank(const MrsBitmap *bm, uint64_t i, uint64_t *out);

// Position of the `(k+1)`-th set bit.
//
// # Safety
// `bm` must be a live handle; `out` must be valid for writes.
MrsStatus mrs_bitmap_select(const MrsBitmap *bm, uint64_t k, uint64_t *out);

// Writes the binary file image into `buf`. `*written` always receives the
// full image size, so a call with `buf = NULL, cap = 0` queries it;
// `MRS_STATUS_BUFFER_TOO_SMALL` is returned when `cap` is short.
//
// # Safety
// `bm` must be a live handle; `buf` must be null or valid for `cap` bytes
// of writes; `written` must be valid for writes.
MrsStatus mrs_bitmap_serialize(const MrsBitmap *bm, uint8_t *buf, size_t cap, size_t *written);

// Rebuilds a bitmap from a file image written by `mrs_bitmap_serialize`.
//
// # Safety
// `buf` must point to `len` readable bytes; `out` must be valid for writes.
MrsStatus mrs_bitmap_deserialize(const uint8_t *buf, size_t len, MrsBitmap **out);

// Static, NUL-terminated description of a status code; unknown codes get
// a generic message.
const char *mrs_status_message(int status);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MUTABLE_RANK_SELECT_H */
