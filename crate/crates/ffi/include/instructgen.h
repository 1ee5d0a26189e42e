#ifndef INSTRUCTGEN_H
#define INSTRUCTGEN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every `ig_*` function.
typedef enum {
  IG_STATUS_OK = 0,
  IG_STATUS_NULL_POINTER = 1,
  IG_STATUS_INVALID_UTF8 = 2,
  // The text contains no word tokens.
  IG_STATUS_NO_WORDS = 3,
  // The text is empty after normalization.
  IG_STATUS_EMPTY_TEXT = 4,
  IG_STATUS_IO_ERROR = 5,
  // The input could not be decoded or parsed.
  IG_STATUS_PARSE_ERROR = 6,
  // An input collection was empty.
  IG_STATUS_EMPTY_INPUT = 7,
  IG_STATUS_DUPLICATE_ID = 8,
  // The category string is not one of c1..c10.
  IG_STATUS_UNKNOWN_CATEGORY = 9,
} IgStatus;

// Opaque per-category novelty index (instructions, trigram sets, and
// responses of previously accepted pairs).
typedef struct IgNoveltyIndex IgNoveltyIndex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ig_version(void);

// Fraction of words that are Bengali (code blocks stripped), in [0, 1].
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` must be writable.
IgStatus ig_bengali_word_ratio(const char *text, double *out);

// True iff every character outside fenced code blocks is Bengali,
// whitespace, common punctuation, or a digit.
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` must be writable.
IgStatus ig_unicode_consistency(const char *text, bool *out);

// Character-trigram Jaccard similarity of two normalized texts, in [0, 1].
//
// # Safety
// `a` and `b` must be valid NUL-terminated strings; `out` must be writable.
IgStatus ig_trigram_similarity(const char *a, const char *b, double *out);

// Distinct word tokens over total word tokens, in [0, 1].
//
// # Safety
// `text` must be a valid NUL-terminated string; `out` must be writable.
IgStatus ig_type_token_ratio(const char *text, double *out);

// Pass@1 over per-item correctness flags (nonzero = correct).
//
// # Safety
// `correct` must point to `len` readable bytes; `out` must be writable.
IgStatus ig_pass_at_1(const uint8_t *correct, uintptr_t len, double *out);

// Whitespace-token and sentence counts for one UTF-8 text file.
//
// # Safety
// `path` must be a valid NUL-terminated string; the out-pointers must be
// writable.
IgStatus ig_corpus_stats_file(const char *path, uint64_t *out_tokens, uint64_t *out_sentences);

// Allocate an empty novelty index. Release with `ig_novelty_index_free`.
IgNoveltyIndex *ig_novelty_index_new(void);

// Free an index created by `ig_novelty_index_new`. NULL is a no-op.
//
// # Safety
// `index` must be NULL or a pointer returned by `ig_novelty_index_new`
// that has not been freed yet.
void ig_novelty_index_free(IgNoveltyIndex *index);

// Number of indexed entries.
//
// # Safety
// `index` must be a live pointer from `ig_novelty_index_new`; `out` must
// be writable.
IgStatus ig_novelty_index_len(const IgNoveltyIndex *index, uintptr_t *out);

// Index an instruction (and optionally its response; pass NULL for none)
// under a category ("c1".."c10"). Ids must be unique.
//
// # Safety
// `index` must be a live, exclusively-held pointer; string arguments must
// be valid NUL-terminated strings (response may be NULL).
IgStatus ig_novelty_index_insert(IgNoveltyIndex *index,
                                 const char *id,
                                 const char *category,
                                 const char *instruction,
                                 const char *response);

// Maximum trigram similarity of `instruction` against every indexed
// instruction (0.0 on an empty index).
//
// # Safety
// `index` must be a live pointer; `instruction` a valid string; `out`
// writable.
IgStatus ig_novelty_max_similarity(const IgNoveltyIndex *index,
                                   const char *instruction,
                                   double *out);

// True iff the normalized response equals an indexed response in the same
// category.
//
// # Safety
// `index` must be a live pointer; string arguments valid; `out` writable.
IgStatus ig_novelty_is_duplicate_response(const IgNoveltyIndex *index,
                                          const char *category,
                                          const char *response,
                                          bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INSTRUCTGEN_H */
