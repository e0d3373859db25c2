#ifndef LSQ_H
#define LSQ_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LsqStatus {
  LSQ_STATUS_OK = 0,
  LSQ_STATUS_NULL_POINTER = 1,
  LSQ_STATUS_INVALID_ARGUMENT = 2,
  LSQ_STATUS_INVALID_UTF8 = 3,
  LSQ_STATUS_GENERATION = 4,
  LSQ_STATUS_PARSE = 5,
  LSQ_STATUS_SCORE = 6,
  LSQ_STATUS_PANIC = 7,
} LsqStatus;

typedef enum LsqTask {
  LSQ_TASK_LATENT_LIST = 0,
  LSQ_TASK_MRCR = 1,
  LSQ_TASK_IDK = 2,
} LsqTask;

typedef enum LsqBucket {
  LSQ_BUCKET_B32K = 0,
  LSQ_BUCKET_B128K = 1,
  LSQ_BUCKET_B1M = 2,
} LsqBucket;

// Opaque instance handle.
typedef struct LsqInstance LsqInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Generates instance `index` of a suite with the given seed, using the
// templated writing pool and the default tokenizer. Targets are drawn from
// `[min_tokens, bucket max / 1.1]`.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum LsqStatus lsq_generate(enum LsqTask task,
                            enum LsqBucket bucket,
                            uint64_t seed,
                            uint64_t index,
                            uintptr_t min_tokens,
                            struct LsqInstance **out);

// Parses one JSONL instance line.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum LsqStatus lsq_instance_from_json(const char *json, struct LsqInstance **out);

// Serializes an instance to one JSON line. Free the result with `lsq_string_free`.
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum LsqStatus lsq_instance_to_json(const struct LsqInstance *inst, char **out);

// # Safety
// `inst` must be null or a handle not yet freed.
void lsq_instance_free(struct LsqInstance *inst);

// # Safety
// `inst` must be a live handle; `out` must be writable.
enum LsqStatus lsq_instance_task(const struct LsqInstance *inst, enum LsqTask *out);

// # Safety
// `inst` must be a live handle; `out` must be writable.
enum LsqStatus lsq_instance_complexity(const struct LsqInstance *inst, uint32_t *out);

// Prompt length recorded at generation time.
//
// # Safety
// `inst` must be a live handle; `out` must be writable.
enum LsqStatus lsq_instance_prompt_tokens(const struct LsqInstance *inst, uintptr_t *out);

// Borrowed; null when `inst` is null.
//
// # Safety
// `inst` must be null or a live handle.
const char *lsq_instance_id(const struct LsqInstance *inst);

// Borrowed; null when `inst` is null.
//
// # Safety
// `inst` must be null or a live handle.
const char *lsq_instance_prompt(const struct LsqInstance *inst);

// Borrowed; null when `inst` is null.
//
// # Safety
// `inst` must be null or a live handle.
const char *lsq_instance_ground_truth(const struct LsqInstance *inst);

// Scores a raw model output against the instance, in `[0, 1]`.
//
// # Safety
// `inst` must be a live handle, `raw_output` a NUL-terminated string and `out` writable.
enum LsqStatus lsq_score(const struct LsqInstance *inst, const char *raw_output, double *out);

// Character-level similarity ratio `2M / (|a| + |b|)`.
//
// # Safety
// `a` and `b` must be NUL-terminated strings; `out` must be writable.
enum LsqStatus lsq_similarity_ratio(const char *a, const char *b, double *out);

// Message for the last failed call on this thread, or null. Free with `lsq_string_free`.
char *lsq_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void lsq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LSQ_H */
