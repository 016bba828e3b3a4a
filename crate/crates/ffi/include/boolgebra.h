#ifndef BOOLGEBRA_H
#define BOOLGEBRA_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status returned by every fallible call.
 */
typedef enum BgStatus {
  BG_OK = 0,
  BG_ERR_NULL = 1,
  BG_ERR_PARSE = 2,
  BG_ERR_CONFIG = 3,
  BG_ERR_NOT_EQUIVALENT = 4,
  BG_ERR_IO = 5,
  BG_ERR_MODEL = 6,
  BG_ERR_PANIC = 7,
  BG_ERR_OTHER = 8,
} BgStatus;

/**
 * Transform selector for [`bg_standalone`] and decision codes.
 */
typedef enum BgOp {
  BG_RW = 0,
  BG_RS = 1,
  BG_RF = 2,
} BgOp;

/**
 * Opaque And-Inverter Graph.
 */
typedef struct BgAig BgAig;

/**
 * Opaque trained predictor.
 */
typedef struct BgModel BgModel;

/**
 * Outcome of [`bg_flow`].
 */
typedef struct BgFlowResult {
  size_t original_size;
  size_t best_size;
  double mean_size;
  size_t rw_size;
  size_t rs_size;
  size_t rf_size;
  /**
   * Candidates whose result failed verification and were dropped.
   */
  size_t rejected;
} BgFlowResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the message of the last failure on this thread into `buf`
 * (NUL-terminated, truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t bg_last_error(char *buf, size_t len);

/**
 * Reads an AIGER file (ASCII or binary by extension).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BgStatus bg_aig_read(const char *path, struct BgAig **out);

/**
 * Parses AIGER bytes, detecting the format from the header.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` be a valid pointer.
 */
enum BgStatus bg_aig_parse(const uint8_t *data, size_t len, struct BgAig **out);

/**
 * Writes a graph; the extension picks ASCII (`.aag`) or binary.
 *
 * # Safety
 * `aig` must come from this library and `path` be NUL-terminated.
 */
enum BgStatus bg_aig_write(const struct BgAig *aig, const char *path);

/**
 * # Safety
 * `aig` must be null or come from this library, and not be used afterwards.
 */
void bg_aig_free(struct BgAig *aig);

/**
 * Number of AND nodes, or 0 for a null handle.
 *
 * # Safety
 * `aig` must be null or come from this library.
 */
size_t bg_aig_size(const struct BgAig *aig);

/**
 * # Safety
 * `aig` must be null or come from this library.
 */
size_t bg_aig_num_inputs(const struct BgAig *aig);

/**
 * # Safety
 * `aig` must be null or come from this library.
 */
size_t bg_aig_num_outputs(const struct BgAig *aig);

/**
 * Length of a decision vector for `aig`: one entry per node id except the
 * constant.
 *
 * # Safety
 * `aig` must be null or come from this library.
 */
size_t bg_decision_len(const struct BgAig *aig);

/**
 * Runs one transform at every node; the result is a new graph.
 *
 * # Safety
 * `aig` must come from this library and `out` be a valid pointer.
 */
enum BgStatus bg_standalone(const struct BgAig *aig, enum BgOp op, struct BgAig **out);

/**
 * Runs the traversal selected by `codes` (0 rw, 1 rs, 2 rf), which must hold
 * [`bg_decision_len`] entries.
 *
 * # Safety
 * `codes` must point to `len` readable bytes; other pointers as above.
 */
enum BgStatus bg_orchestrate(const struct BgAig *aig,
                             const uint8_t *codes,
                             size_t len,
                             struct BgAig **out);

/**
 * Compares two graphs: exhaustively when `random_words` is 0, otherwise on
 * `random_words * 64` seeded random patterns. Returns `BG_OK` when no
 * difference is found and `BG_ERR_NOT_EQUIVALENT` otherwise.
 *
 * # Safety
 * Both handles must come from this library.
 */
enum BgStatus bg_equivalent(const struct BgAig *a,
                            const struct BgAig *b,
                            size_t random_words,
                            uint64_t seed);

/**
 * # Safety
 * `path` must be NUL-terminated and `out` a valid pointer.
 */
enum BgStatus bg_model_load(const char *path, struct BgModel **out);

/**
 * # Safety
 * `model` must be null or come from this library, and not be used afterwards.
 */
void bg_model_free(struct BgModel *model);

/**
 * Sizes of the three standalone passes.
 *
 * # Safety
 * `aig` must come from this library and `out` be a valid pointer.
 */
enum BgStatus bg_baselines(const struct BgAig *aig, struct BgFlowResult *out);

/**
 * Samples `sample_count` decision vectors, keeps the `top_k` best scored by
 * `model`, evaluates and verifies them. When `best` is not null it receives
 * the best optimized graph.
 *
 * # Safety
 * Handles must come from this library; `out` must be valid; `best` may be null.
 */
enum BgStatus bg_flow(const struct BgAig *aig,
                      const struct BgModel *model,
                      size_t sample_count,
                      size_t top_k,
                      uint64_t seed,
                      struct BgFlowResult *out,
                      struct BgAig **best);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BOOLGEBRA_H */
