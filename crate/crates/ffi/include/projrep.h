#ifndef PROJREP_H
#define PROJREP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ProjrepStatus {
  PROJREP_STATUS_OK = 0,
  PROJREP_STATUS_NULL_POINTER = 1,
  PROJREP_STATUS_INVALID_UTF8 = 2,
  PROJREP_STATUS_PARSE = 3,
  PROJREP_STATUS_VALIDATION = 4,
  PROJREP_STATUS_NOT_COMMUTING = 5,
  PROJREP_STATUS_COMPUTATION = 6,
  PROJREP_STATUS_PANIC = 7,
} ProjrepStatus;

/**
 * A local exponent table.
 */
typedef struct ProjrepExponent ProjrepExponent;

/**
 * A validated ray representation.
 */
typedef struct ProjrepRep ProjrepRep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *projrep_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *projrep_version(void);

/**
 * Release a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void projrep_string_free(char *s);

/**
 * Parse and validate a representation from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum ProjrepStatus projrep_rep_from_json(const char *json, struct ProjrepRep **out);

/**
 * # Safety
 * `rep` must come from [`projrep_rep_from_json`] and not have been freed.
 */
void projrep_rep_free(struct ProjrepRep *rep);

/**
 * Group order of a representation, 0 for NULL.
 *
 * # Safety
 * `rep` must be NULL or a live handle.
 */
size_t projrep_rep_order(const struct ProjrepRep *rep);

/**
 * Hilbert-space dimension, 0 for NULL.
 *
 * # Safety
 * `rep` must be NULL or a live handle.
 */
size_t projrep_rep_dim(const struct ProjrepRep *rep);

/**
 * Local exponent table of a representation.
 *
 * # Safety
 * `rep` must be a live handle and `out` writable.
 */
enum ProjrepStatus projrep_rep_exponent(const struct ProjrepRep *rep, struct ProjrepExponent **out);

/**
 * Determinant trivialization report as JSON.
 *
 * # Safety
 * `rep` must be a live handle and `out_json` writable.
 */
enum ProjrepStatus projrep_rep_weyl(const struct ProjrepRep *rep, char **out_json);

/**
 * Parse and validate an exponent table from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum ProjrepStatus projrep_exponent_from_json(const char *json, struct ProjrepExponent **out);

/**
 * # Safety
 * `d` must come from this library and not have been freed.
 */
void projrep_exponent_free(struct ProjrepExponent *d);

/**
 * Exact commutator phase `β(a,b)` as the reduced fraction `num/den` of a turn.
 *
 * # Safety
 * `d` must be a live handle; `num` and `den` writable.
 */
enum ProjrepStatus projrep_exponent_commutator(const struct ProjrepExponent *d,
                                               size_t a,
                                               size_t b,
                                               int64_t *num,
                                               int64_t *den);

/**
 * Decide whether the table is a coboundary; the report is written as JSON.
 *
 * # Safety
 * `d` must be a live handle and `out_json` writable.
 */
enum ProjrepStatus projrep_exponent_trivialize(const struct ProjrepExponent *d, char **out_json);

/**
 * Run one command-line invocation (without the program name) and return the
 * rendered report. `exit_code` receives the process exit code the CLI would
 * use.
 *
 * # Safety
 * `argv` must point to `argc` NUL-terminated strings; `out` and `exit_code`
 * must be writable.
 */
enum ProjrepStatus projrep_run(size_t argc,
                               const char *const *argv,
                               char **out,
                               int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PROJREP_H */
