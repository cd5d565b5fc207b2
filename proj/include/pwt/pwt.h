#ifndef PWT_PWT_H
#define PWT_PWT_H

/* C interface to the wavelet tree library. Every function returns a status
 * code; on failure pwt_last_error() holds a message for the calling thread.
 * Handles are opaque and must be released with the matching free function. */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum pwt_status {
  PWT_OK = 0,
  PWT_E_INVALID_ARGUMENT = 1,
  PWT_E_SYMBOL_OUT_OF_RANGE = 2,
  PWT_E_OUT_OF_RANGE = 3,
  PWT_E_NO_SUCH_OCCURRENCE = 4,
  PWT_E_OVERFLOW = 5,
  PWT_E_IO = 6,
  PWT_E_FORMAT = 7,
  PWT_E_CHECKSUM = 8,
  PWT_E_DECODE = 9,
  PWT_E_INTERNAL = 100
};

typedef struct pwt_sequence pwt_sequence;
typedef struct pwt_index pwt_index;

typedef struct pwt_info {
  uint64_t n;
  uint64_t sigma;
  uint32_t kind;      /* 0 plain, 1 huffman, 2 matrix, 3 multiary */
  uint32_t algorithm; /* see pwt_algorithm_name */
  uint32_t levels;
  uint32_t arity;     /* 2 for the binary kinds */
  uint64_t nodes;
  uint64_t bitmap_bits;
  uint64_t directory_bits;
  int has_directories;
} pwt_info;

const char* pwt_last_error(void);
const char* pwt_status_name(int status);
const char* pwt_kind_name(uint32_t kind);
const char* pwt_algorithm_name(uint32_t algorithm);

void pwt_set_threads(int threads);
int pwt_get_threads(void);

/* format: "bytes", "u16le", "u32le" or "text-ints"; sigma 0 = max + 1. */
int pwt_sequence_load(const char* path, const char* format, uint64_t sigma, pwt_sequence** out);
int pwt_sequence_random(uint64_t n, uint64_t sigma, uint64_t seed, pwt_sequence** out);
int pwt_sequence_from_array(const uint32_t* data, uint64_t n, uint64_t sigma, pwt_sequence** out);
uint64_t pwt_sequence_size(const pwt_sequence* s);
uint64_t pwt_sequence_sigma(const pwt_sequence* s);
const uint32_t* pwt_sequence_data(const pwt_sequence* s);
void pwt_sequence_free(pwt_sequence* s);

/* algorithm: level, sort, msort, packed, huffman, matrix or multiary. arity
 * is used by multiary only. directories = 0 skips the rank/select
 * directories; pwt_build_directories adds them later. */
int pwt_build(const pwt_sequence* s, const char* algorithm, unsigned arity, int directories, pwt_index** out);
int pwt_build_directories(pwt_index* idx);
int pwt_index_info(const pwt_index* idx, pwt_info* out);
void pwt_index_free(pwt_index* idx);

int pwt_access(const pwt_index* idx, uint64_t i, uint32_t* out);
int pwt_rank(const pwt_index* idx, uint64_t c, uint64_t i, uint64_t* out);
int pwt_select(const pwt_index* idx, uint64_t c, uint64_t k, uint64_t* out);

/* Test hook: flips one bit of the first stored bitmap (position pos modulo
 * its length) so that queries disagree with the input. */
int pwt_inject_fault(pwt_index* idx, uint64_t pos);

int pwt_serialize(const pwt_index* idx, int store_directories, uint8_t** buf, uint64_t* len);
int pwt_deserialize(const uint8_t* buf, uint64_t len, pwt_index** out);
void pwt_buffer_free(uint8_t* buf);
int pwt_save(const pwt_index* idx, const char* path, int store_directories);
int pwt_load(const char* path, pwt_index** out);

#ifdef __cplusplus
}
#endif

#endif
