#ifndef RATINGLAB_H
#define RATINGLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  RL_STATUS_OK = 0,
  RL_STATUS_NULL_POINTER = 1,
  RL_STATUS_INVALID_UTF8 = 2,
  RL_STATUS_INVALID_ARGUMENT = 3,
  RL_STATUS_CONFIG = 4,
  RL_STATUS_OFF_GRID = 5,
  RL_STATUS_IO = 6,
  RL_STATUS_BUFFER_TOO_SMALL = 7,
  RL_STATUS_PANIC = 8,
} RlStatus;

typedef enum {
  RL_VERDICT_HOLDS = 0,
  RL_VERDICT_REFUTED = 1,
  RL_VERDICT_INCONCLUSIVE = 2,
} RlVerdict;

/**
 * Opaque rating system handle.
 */
typedef struct RlSystem RlSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * successful call. Valid until the next `rl_*` call on the same thread.
 */
const char *rl_last_error(void);

/**
 * Library version as a static nul-terminated string.
 */
const char *rl_version(void);

/**
 * Creates one of the built-in systems (`"sonas"`, `"logistic-unclamped"`, ...).
 *
 * # Safety
 * `name` must be a nul-terminated string; `out` must be writable.
 */
RlStatus rl_system_builtin(const char *name, RlSystem **out);

/**
 * Creates a system from a JSON system document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
RlStatus rl_system_from_json(const char *json, RlSystem **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `sys` must come from this library and not be used afterwards.
 */
void rl_system_free(RlSystem *sys);

/**
 * Probability that true rating `x` beats true rating `y`.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
RlStatus rl_sigma(const RlSystem *sys, double x, double y, double *out);

/**
 * Total stake `K(x, y)` of a match.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
RlStatus rl_k(const RlSystem *sys, double x, double y, double *out);

/**
 * Points a winner rated `winner` takes from a loser rated `loser`.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
RlStatus rl_adjustment(const RlSystem *sys, double winner, double loser, double *out);

/**
 * Expected rating change of a player rated `x` (true `x_star`) against an
 * opponent rated `y` (true `y_star`).
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
RlStatus rl_expected_gain(const RlSystem *sys,
                          double x,
                          double x_star,
                          double y,
                          double y_star,
                          double *out);

/**
 * Ratings of both players after `winner` beats `loser`.
 *
 * # Safety
 * `sys` must be a live handle; both outputs must be writable.
 */
RlStatus rl_apply_match(const RlSystem *sys,
                        double winner,
                        double loser,
                        double *winner_out,
                        double *loser_out);

/**
 * Checks a property (by name, e.g. `"p_oi"`) on the grid `lo..=hi` at
 * `step`. Pass NaN for `p` when the property takes no margin.
 *
 * # Safety
 * `sys` must be a live handle; `property` a nul-terminated string; both
 * outputs writable.
 */
RlStatus rl_verify(const RlSystem *sys,
                   const char *property,
                   double p,
                   double lo,
                   double hi,
                   double step,
                   RlVerdict *verdict_out,
                   double *residual_out);

/**
 * Like `rl_verify`, returning the full report as a JSON string that the
 * caller releases with `rl_string_free`.
 *
 * # Safety
 * As for `rl_verify`; `json_out` must be writable.
 */
RlStatus rl_verify_json(const RlSystem *sys,
                        const char *property,
                        double p,
                        double lo,
                        double hi,
                        double step,
                        char **json_out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void rl_string_free(char *s);

/**
 * Builds a skill chain with link probability `p` from `r1`, using at most
 * `budget` ratings none above `ceiling`. The chain length goes to `len_out`;
 * the ratings are copied to `ratings` when `capacity` is large enough and
 * `RL_STATUS_BUFFER_TOO_SMALL` is returned otherwise. `ratings` may be
 * null when `capacity` is zero, to query the length.
 *
 * # Safety
 * `sys` must be a live handle; `ratings` must hold `capacity` doubles;
 * `len_out` must be writable.
 */
RlStatus rl_chain(const RlSystem *sys,
                  double p,
                  double r1,
                  size_t budget,
                  double ceiling,
                  double *ratings,
                  size_t capacity,
                  size_t *len_out);

/**
 * Searches `[lo, hi]` for the correctly rated opponent maximising the
 * magnitude of expected gain. When every opponent is equivalent within
 * `tolerance`, `indifferent_out` is set and `rating_out` is NaN.
 *
 * # Safety
 * `sys` must be a live handle; all outputs must be writable.
 */
RlStatus rl_max_gain_opponent(const RlSystem *sys,
                              double x,
                              double x_star,
                              double lo,
                              double hi,
                              double resolution,
                              double tolerance,
                              double *rating_out,
                              double *gain_out,
                              bool *indifferent_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RATINGLAB_H */
