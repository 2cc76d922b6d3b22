#ifndef BFC_ORACLE_H
#define BFC_ORACLE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum BfcStatus {
  BFC_STATUS_OK = 0,
  BFC_STATUS_NULL_POINTER = 1,
  BFC_STATUS_INVALID_UTF8 = 2,
  BFC_STATUS_INVALID_ARGUMENT = 3,
  BFC_STATUS_IO = 4,
  BFC_STATUS_DATA = 5,
  BFC_STATUS_PANIC = 6,
} BfcStatus;

typedef enum BfcLabel {
  BFC_LABEL_COMMERCIAL = 0,
  BFC_LABEL_RESIDENTIAL = 1,
} BfcLabel;

/**
 * A loaded corpus directory.
 */
typedef struct BfcCorpus BfcCorpus;

/**
 * Trained multinomial Naive Bayes model.
 */
typedef struct BfcNbModel BfcNbModel;

/**
 * Add-one smoothed unigram model.
 */
typedef struct BfcUnigramModel BfcUnigramModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bfc_version(void);

/**
 * Message for the last failed call on this thread, or null after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *bfc_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library and not yet freed.
 */
void bfc_string_free(char *s);

/**
 * Self-BLEU (percent) of `n` UTF-8 texts using `max_n`-gram precision.
 *
 * # Safety
 * `texts` must point to `n` valid NUL-terminated strings; `out` must be writable.
 */
enum BfcStatus bfc_self_bleu(const char *const *texts, size_t n, size_t max_n, double *out);

/**
 * # Safety
 * `texts` must point to `n` valid NUL-terminated strings; `out` must be writable.
 */
enum BfcStatus bfc_unigram_train(const char *const *texts, size_t n, struct BfcUnigramModel **out);

/**
 * Loads a `token<TAB>count` model file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` must be writable.
 */
enum BfcStatus bfc_unigram_load(const char *path, struct BfcUnigramModel **out);

/**
 * # Safety
 * `model` must be a live handle; `path` a valid NUL-terminated string.
 */
enum BfcStatus bfc_unigram_save(const struct BfcUnigramModel *model, const char *path);

/**
 * Per-token log10 perplexity of `n` texts.
 *
 * # Safety
 * `model` must be a live handle, `texts` must point to `n` valid strings and
 * `out` must be writable.
 */
enum BfcStatus bfc_unigram_log10_perplexity(const struct BfcUnigramModel *model,
                                            const char *const *texts,
                                            size_t n,
                                            double *out);

/**
 * # Safety
 * `model` must be null or a handle from this library that has not been freed.
 */
void bfc_unigram_free(struct BfcUnigramModel *model);

/**
 * Loads a corpus directory (`buildings.jsonl`, `tweets.jsonl`).
 *
 * # Safety
 * `dir` must be a valid NUL-terminated string; `out` must be writable.
 */
enum BfcStatus bfc_corpus_load(const char *dir, struct BfcCorpus **out);

/**
 * # Safety
 * `corpus` must be a live handle.
 */
size_t bfc_corpus_building_count(const struct BfcCorpus *corpus);

/**
 * # Safety
 * `corpus` must be a live handle.
 */
size_t bfc_corpus_tweet_count(const struct BfcCorpus *corpus);

/**
 * # Safety
 * `corpus` must be null or a handle from this library that has not been freed.
 */
void bfc_corpus_free(struct BfcCorpus *corpus);

/**
 * Trains Naive Bayes on `n` (text, label) pairs with smoothing `alpha`.
 *
 * # Safety
 * `texts` and `labels` must each point to `n` elements; `out` must be writable.
 */
enum BfcStatus bfc_nb_train(const char *const *texts,
                            const enum BfcLabel *labels,
                            size_t n,
                            double alpha,
                            struct BfcNbModel **out);

/**
 * # Safety
 * `model` must be a live handle, `text` a valid string, `out` writable.
 */
enum BfcStatus bfc_nb_predict(const struct BfcNbModel *model, const char *text, enum BfcLabel *out);

/**
 * # Safety
 * `model` must be null or a handle from this library that has not been freed.
 */
void bfc_nb_free(struct BfcNbModel *model);

/**
 * Runs a configuration (`"real_world"`, `"synthetic"` or `"cross_domain"`) over
 * `n_seeds` seeds with default options and returns the aggregated metrics as
 * JSON in `*out_json`, to be released with [`bfc_string_free`].
 *
 * # Safety
 * `mode` must be a valid string, `real` and `synthetic` live handles, `seeds`
 * must point to `n_seeds` values and `out_json` must be writable.
 */
enum BfcStatus bfc_run_configuration(const char *mode,
                                     const struct BfcCorpus *real,
                                     const struct BfcCorpus *synthetic,
                                     const uint64_t *seeds,
                                     size_t n_seeds,
                                     char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BFC_ORACLE_H */
