/*
 * Copyright 2026 The nppkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of nppkit: next-phrase-prediction instances, completion pairs
 * and completion metrics built from constituency-parsed corpora.
 *
 * Conventions:
 *   - Objects are opaque handles created by npp_*_new / npp_*_build /
 *     npp_*_parse functions and released by the matching npp_*_free. Free
 *     functions accept NULL.
 *   - Functions that can fail return npp_status. On failure the output handle
 *     is set to NULL and npp_last_error() describes the failure (the message
 *     is per thread and valid until the next failing call on that thread).
 *   - Strings returned as `const char *` are owned by the handle they came
 *     from. Strings returned through `char **` are owned by the caller and
 *     released with npp_string_free.
 *   - Handles are immutable once built and may be read from several threads.
 */
#ifndef NPPKIT_NPPKIT_H_
#define NPPKIT_NPPKIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NPPKIT_BUILDING_LIBRARY)
#    define NPPKIT_API __declspec(dllexport)
#  else
#    define NPPKIT_API __declspec(dllimport)
#  endif
#else
#  define NPPKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum npp_status {
  NPP_OK = 0,
  NPP_ERR_INVALID_ARGUMENT = 1,
  NPP_ERR_UNBALANCED_BRACKETS = 2,
  NPP_ERR_EMPTY_CONSTITUENT = 3,
  NPP_ERR_MALFORMED_LABEL = 4,
  NPP_ERR_MALFORMED_TREE = 5,
  NPP_ERR_MORE_CHOICES_THAN_LETTERS = 6,
  NPP_ERR_RATIO_SUM_INVALID = 7,
  NPP_ERR_COUNT_MISMATCH = 8,
  NPP_ERR_SINGLE_SEGMENT_CORPUS = 9,
  NPP_ERR_IO = 10,
  NPP_ERR_CONFIG = 11,
  NPP_ERR_CONTRACT_VIOLATION = 12,
  NPP_ERR_INTERNAL = 13
} npp_status;

typedef enum npp_phrase_type {
  NPP_PHRASE_NP = 0,
  NPP_PHRASE_VP = 1,
  NPP_PHRASE_PP = 2
} npp_phrase_type;

typedef enum npp_skip_reason {
  NPP_SKIP_NONE = 0,
  NPP_SKIP_NO_ELIGIBLE_GROUP = 1,
  NPP_SKIP_ANSWER_AT_SENTENCE_START = 2,
  NPP_SKIP_POOL_TOO_SMALL = 3,
  NPP_SKIP_MALFORMED_TREE = 4,
  NPP_SKIP_MORE_CHOICES_THAN_LETTERS = 5
} npp_skip_reason;

typedef struct npp_span {
  size_t start; /* first token */
  size_t end;   /* one past the last token */
} npp_span;

typedef struct npp_tree npp_tree;
typedef struct npp_phrases npp_phrases;
typedef struct npp_instance npp_instance;
typedef struct npp_pairs npp_pairs;
typedef struct npp_strings npp_strings;
typedef struct npp_report npp_report;
typedef struct npp_config npp_config;
typedef struct npp_run npp_run;

/* Library */
NPPKIT_API const char *npp_version(void);
NPPKIT_API const char *npp_status_name(npp_status status);
NPPKIT_API const char *npp_last_error(void);
/* Process exit code for a status: 0 success, 1 usage/config, 2 input I/O,
 * 3 data-contract violation. */
NPPKIT_API int npp_status_exit_code(npp_status status);
NPPKIT_API void npp_string_free(char *s);

/* Treebank */
NPPKIT_API npp_status npp_tree_parse(const char *text, size_t length,
                                     npp_tree **out);
NPPKIT_API void npp_tree_free(npp_tree *tree);
NPPKIT_API size_t npp_tree_num_tokens(const npp_tree *tree);
NPPKIT_API const char *npp_tree_token(const npp_tree *tree, size_t index);
NPPKIT_API npp_status npp_tree_to_bracketed(const npp_tree *tree, char **out);
/* Spans of the nodes labeled `label` in pre-order. Writes up to `capacity`
 * spans and stores the total number of such nodes in *count. */
NPPKIT_API npp_status npp_tree_nodes_with_label(const npp_tree *tree,
                                                const char *label,
                                                npp_span *spans,
                                                size_t capacity,
                                                size_t *count);

/* Phrase extraction */
NPPKIT_API npp_status npp_phrases_extract(const npp_tree *tree,
                                          npp_phrases **out);
NPPKIT_API void npp_phrases_free(npp_phrases *phrases);
NPPKIT_API size_t npp_phrases_count(const npp_phrases *phrases,
                                    npp_phrase_type type);
NPPKIT_API npp_status npp_phrases_get(const npp_phrases *phrases,
                                      npp_phrase_type type, size_t index,
                                      npp_span *span, const char **text);
NPPKIT_API const char *npp_phrase_type_name(npp_phrase_type type);

/* Multiple-choice instances (next phrase or next sentence). A built handle
 * is either an instance or a skip; check npp_instance_skip_reason first. */
NPPKIT_API npp_status npp_npp_build(const npp_tree *tree,
                                    const char *sentence_id,
                                    uint64_t global_seed,
                                    size_t min_group_size,
                                    npp_instance **out);
NPPKIT_API npp_status npp_nsp_build(const char *const *doc, size_t doc_length,
                                    size_t index, const char *sentence_id,
                                    const char *const *pool,
                                    size_t pool_length, uint64_t global_seed,
                                    size_t distractors, npp_instance **out);
NPPKIT_API void npp_instance_free(npp_instance *instance);
NPPKIT_API npp_skip_reason npp_instance_skip_reason(const npp_instance *instance);
NPPKIT_API const char *npp_instance_id(const npp_instance *instance);
NPPKIT_API const char *npp_instance_input(const npp_instance *instance);
NPPKIT_API const char *npp_instance_target(const npp_instance *instance);
/* Partial query (next phrase) or context sentence (next sentence). */
NPPKIT_API const char *npp_instance_query(const npp_instance *instance);
NPPKIT_API size_t npp_instance_num_choices(const npp_instance *instance);
NPPKIT_API const char *npp_instance_choice(const npp_instance *instance,
                                           size_t index);
NPPKIT_API size_t npp_instance_answer_index(const npp_instance *instance);
/* Serialized JSON record {"id","input","target"}; NULL for skips. */
NPPKIT_API const char *npp_instance_record(const npp_instance *instance);

/* Completion pairs */
NPPKIT_API npp_status npp_pairs_build(const char *const *tokens, size_t count,
                                      const char *sentence_id,
                                      npp_pairs **out);
NPPKIT_API void npp_pairs_free(npp_pairs *pairs);
NPPKIT_API size_t npp_pairs_count(const npp_pairs *pairs);
NPPKIT_API npp_status npp_pairs_get(const npp_pairs *pairs, size_t index,
                                    const char **p, const char **q,
                                    size_t *split_point);

/* Text processing */
NPPKIT_API npp_status npp_split_sentences(const char *document,
                                          npp_strings **out);
NPPKIT_API npp_status npp_tokenize(const char *sentence, npp_strings **out);
NPPKIT_API void npp_strings_free(npp_strings *strings);
NPPKIT_API size_t npp_strings_count(const npp_strings *strings);
NPPKIT_API const char *npp_strings_get(const npp_strings *strings,
                                       size_t index);

/* Metrics. Reference entries may hold several tab-separated alternatives. */
NPPKIT_API npp_status npp_report_from_lines(const char *const *candidates,
                                            const char *const *references,
                                            size_t count, npp_report **out);
NPPKIT_API npp_status npp_report_from_files(const char *candidates_path,
                                            const char *references_path,
                                            npp_report **out);
NPPKIT_API void npp_report_free(npp_report *report);
NPPKIT_API double npp_report_bleu4(const npp_report *report);
NPPKIT_API double npp_report_meteor(const npp_report *report);
/* Returns 0 when CIDEr is undefined (single segment) and sets *defined. */
NPPKIT_API double npp_report_cider(const npp_report *report, int *defined);
NPPKIT_API size_t npp_report_num_segments(const npp_report *report);
NPPKIT_API npp_status npp_report_segment(const npp_report *report,
                                         size_t index, double *bleu,
                                         double *meteor, double *cider);
NPPKIT_API npp_status npp_report_format(const npp_report *report, char **text);
NPPKIT_API npp_status npp_report_json(const npp_report *report, char **json);

/* Pipeline configuration (keys as in the key=value config file). */
NPPKIT_API npp_status npp_config_new(npp_config **out);
NPPKIT_API void npp_config_free(npp_config *config);
NPPKIT_API npp_status npp_config_set(npp_config *config, const char *key,
                                     const char *value);
NPPKIT_API npp_status npp_config_load(npp_config *config, const char *path);

/* Pipeline commands. Each returns a run handle with counters and a
 * human-readable summary. */
NPPKIT_API npp_status npp_run_build_npp(const npp_config *config,
                                        npp_run **out);
NPPKIT_API npp_status npp_run_build_pairs(const npp_config *config,
                                          npp_run **out);
NPPKIT_API npp_status npp_run_build_nsp(const npp_config *config,
                                        npp_run **out);
/* One row per (names[i], paths[i]); with count 0 the configured input is
 * used. */
NPPKIT_API npp_status npp_run_stats(const npp_config *config,
                                    const char *const *names,
                                    const char *const *paths, size_t count,
                                    npp_run **out);
NPPKIT_API npp_status npp_run_evaluate(const npp_config *config,
                                       const char *candidates_path,
                                       const char *references_path,
                                       const char *report_path, npp_run **out);
NPPKIT_API void npp_run_free(npp_run *run);
NPPKIT_API const char *npp_run_summary(const npp_run *run);
/* Looks up a counter ("instances", "pairs", ...) or a skip bucket
 * ("skip.NoEligibleGroup"). Returns NPP_ERR_INVALID_ARGUMENT if absent. */
NPPKIT_API npp_status npp_run_count(const npp_run *run, const char *key,
                                    uint64_t *value);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* NPPKIT_NPPKIT_H_ */
