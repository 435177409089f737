/* C ABI for the toricq toolkit. See README.md for usage. */

#ifndef TORICQ_H
#define TORICQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call. The first five values match the
 * `toricq` CLI exit codes; the rest are FFI-specific.
 */
typedef enum ToricqStatus {
  TORICQ_STATUS_OK = 0,
  TORICQ_STATUS_PARSE_ERROR = 1,
  TORICQ_STATUS_INVALID_FAN = 2,
  TORICQ_STATUS_OUT_OF_REGIME = 3,
  TORICQ_STATUS_MISMATCH = 4,
  TORICQ_STATUS_NULL_ARGUMENT = 5,
  TORICQ_STATUS_INVALID_UTF8 = 6,
  TORICQ_STATUS_PANICKED = 7,
} ToricqStatus;

/**
 * Opaque handle to a validated complete nonsingular fan.
 */
typedef struct ToricqFan ToricqFan;

/**
 * Options shared by the payload-producing calls. Obtain defaults from
 * `toricq_options_default` and override fields as needed; passing a
 * NULL options pointer is equivalent to the defaults.
 */
typedef struct ToricqOptions {
  /**
   * Maximal-cone index (0-based) whose complement rays give the
   * Picard basis; negative means the default cone 0.
   */
  int32_t basis_cone;
  /**
   * Polarization spec "pic:c1,..,cr" or "ray:a1,..,al"; NULL means
   * the anticanonical class, which must then be ample.
   */
  const char *polarization;
  /**
   * Largest polarization degree of enumerated curve classes.
   */
  int64_t degree_bound;
  /**
   * Total-degree cap on the deformation parameters t_0..t_r.
   */
  uint32_t t_trunc;
  /**
   * Lowest retained z exponent; read only when has_z_floor is nonzero,
   * otherwise the documented default formula applies.
   */
  int64_t z_floor;
  uint8_t has_z_floor;
  /**
   * Nonzero selects the big_I_k0 series for `toricq_ifun_json`;
   * zero selects small_I.
   */
  uint8_t big_i_k0;
} ToricqOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * The options used when a payload call receives a NULL options pointer.
 */
struct ToricqOptions toricq_options_default(void);

/**
 * Parses and validates a fan from JSON (1-based cone indices, same
 * schema as the CLI's fan files). On success writes a new handle
 * through `out_fan`.
 *
 * # Safety
 * `json` and `name` must be null or NUL-terminated strings; `out_fan`
 * must be a valid, non-null pointer to writable storage.
 */
enum ToricqStatus toricq_fan_from_json(const char *json,
                                       const char *name,
                                       struct ToricqFan **out_fan);

/**
 * Loads one of the built-in fans (p1, p2, p3, p4, p1xp1, f2).
 *
 * # Safety
 * `name` must be null or a NUL-terminated string; `out_fan` must be a
 * valid, non-null pointer to writable storage.
 */
enum ToricqStatus toricq_fan_builtin(const char *name, struct ToricqFan **out_fan);

/**
 * Releases a fan handle; a null pointer is ignored.
 *
 * # Safety
 * `fan` must be null or a pointer previously returned through
 * `toricq_fan_from_json` or `toricq_fan_builtin`, not yet freed.
 */
void toricq_fan_free(struct ToricqFan *fan);

/**
 * Ambient lattice dimension, or -1 for a null handle.
 *
 * # Safety
 * `fan` must be null or a live fan handle.
 */
int32_t toricq_fan_dim(const struct ToricqFan *fan);

/**
 * Number of rays, or -1 for a null handle.
 *
 * # Safety
 * `fan` must be null or a live fan handle.
 */
int32_t toricq_fan_n_rays(const struct ToricqFan *fan);

/**
 * Picard rank (rays minus dimension), or -1 for a null handle.
 *
 * # Safety
 * `fan` must be null or a live fan handle.
 */
int32_t toricq_fan_picard_rank(const struct ToricqFan *fan);

/**
 * Validation report for the fan, as the CLI's `validate` JSON payload.
 * Options are ignored; a NULL options pointer is fine.
 *
 * # Safety
 * `fan` must be a live fan handle; `options` must be null or valid;
 * `out_json` must be a valid, non-null pointer to writable storage.
 */
enum ToricqStatus toricq_validate_json(const struct ToricqFan *fan,
                                       const struct ToricqOptions *options,
                                       char **out_json);

/**
 * Geometry report (weight matrix, wall curves, positivity verdicts,
 * Betti numbers), as the CLI's `info` JSON payload.
 *
 * # Safety
 * `fan` must be a live fan handle; `options` must be null or valid;
 * `out_json` must be a valid, non-null pointer to writable storage.
 */
enum ToricqStatus toricq_info_json(const struct ToricqFan *fan,
                                   const struct ToricqOptions *options,
                                   char **out_json);

/**
 * Truncated series (small_I, or big_I_k0 when options select it), as
 * the CLI's `ifun` JSON payload.
 *
 * # Safety
 * `fan` must be a live fan handle; `options` must be null or valid;
 * `out_json` must be a valid, non-null pointer to writable storage.
 */
enum ToricqStatus toricq_ifun_json(const struct ToricqFan *fan,
                                   const struct ToricqOptions *options,
                                   char **out_json);

/**
 * Mirror map, its inverse, the round-trip check, and the substituted
 * series, as the CLI's `mirror` JSON payload.
 *
 * # Safety
 * `fan` must be a live fan handle; `options` must be null or valid;
 * `out_json` must be a valid, non-null pointer to writable storage.
 */
enum ToricqStatus toricq_mirror_json(const struct ToricqFan *fan,
                                     const struct ToricqOptions *options,
                                     char **out_json);

/**
 * Coefficient-by-coefficient comparison against the closed-form
 * projective-space series, as the CLI's `compare-pn` JSON payload.
 * Returns Ok when identical and Mismatch when any coefficient
 * differs; both outcomes write the payload. The polarization option
 * must stay NULL, matching the CLI contract.
 *
 * # Safety
 * `fan` must be a live fan handle; `options` must be null or valid;
 * `out_json` must be a valid, non-null pointer to writable storage.
 */
enum ToricqStatus toricq_compare_pn_json(const struct ToricqFan *fan,
                                         const struct ToricqOptions *options,
                                         char **out_json);

/**
 * Message for the most recent non-OK status on this thread, or null
 * if none. The pointer stays valid until the next toricq call on the
 * same thread; do not free it.
 */
const char *toricq_last_error(void);

/**
 * Releases a string written through an `out_json` parameter; a null
 * pointer is ignored.
 *
 * # Safety
 * `s` must be null or a pointer previously written by a toricq call,
 * not yet freed.
 */
void toricq_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORICQ_H */
