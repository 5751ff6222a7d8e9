#ifndef DIFFAM_H
#define DIFFAM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define DIFFAM_OK 0

// A required pointer argument was null.
#define DIFFAM_ERR_NULL -1

// A string argument was not valid UTF-8.
#define DIFFAM_ERR_UTF8 -2

// The library panicked; the handle arguments should not be reused.
#define DIFFAM_ERR_PANIC -3

// Opaque AMD code.
typedef struct DiffamCode DiffamCode;

// Opaque set family over a finite abelian group.
typedef struct DiffamFamily DiffamFamily;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last nonzero status on this thread, or an empty string.
// The pointer stays valid until the next call into the library on the same
// thread.
const char *diffam_last_error_message(void);

// Library version as a static string.
const char *diffam_version(void);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void diffam_string_free(char *s);

// Run one command given as a JSON request object, as the command-line tool
// would. Writes the JSON envelope and the command exit code.
//
// # Safety
// `request_json` must be a nul-terminated string; the out-pointers must be
// valid for writes.
int32_t diffam_execute(const char *request_json, char **envelope_json, int32_t *exit_code);

// Parse a family from JSON: `{"group": ..., "sets": [...]}`.
//
// # Safety
// `family_json` must be a nul-terminated string; `out_family` must be valid
// for writes.
int32_t diffam_family_from_json(const char *family_json, struct DiffamFamily **out_family);

// # Safety
// `family` must come from this library and not have been freed. Null is
// ignored.
void diffam_family_free(struct DiffamFamily *family);

// Group order and number of sets.
//
// # Safety
// `family` must be a live handle; the out-pointers must be valid for writes.
int32_t diffam_family_shape(const struct DiffamFamily *family, size_t *order, size_t *sets);

// Check `family` against a family type (`"edf"`, `"sedf"`, ...).
// `options_json` may be null or an object with `lambda`, `lambdas`,
// `classes` and `relax_sizes`. Sets `passed` to 1 or 0 and writes the
// report.
//
// # Safety
// `family` must be a live handle, the strings nul-terminated and the
// out-pointers valid for writes.
int32_t diffam_family_verify(const struct DiffamFamily *family,
                             const char *kind,
                             const char *options_json,
                             int32_t *passed,
                             char **report_json);

// Parse a code from JSON: `{"group": ..., "sources": [...]}`.
//
// # Safety
// `code_json` must be a nul-terminated string; `out_code` must be valid for
// writes.
int32_t diffam_code_from_json(const char *code_json, struct DiffamCode **out_code);

// The code with one equiprobable source per set of `family`.
//
// # Safety
// `family` must be a live handle; `out_code` must be valid for writes.
int32_t diffam_code_from_family(const struct DiffamFamily *family, struct DiffamCode **out_code);

// # Safety
// `code` must come from this library and not have been freed. Null is
// ignored.
void diffam_code_free(struct DiffamCode *code);

// Optimal weak-game success probability as a reduced fraction.
//
// # Safety
// `code` must be a live handle; the out-pointers must be valid for writes.
int32_t diffam_code_weak_optimum(const struct DiffamCode *code, int64_t *num, int64_t *den);

// Optimal strong-game success probability, maximised over sources.
//
// # Safety
// `code` must be a live handle; the out-pointers must be valid for writes.
int32_t diffam_code_strong_optimum(const struct DiffamCode *code, int64_t *num, int64_t *den);

// Optimality classification of `code` as JSON.
//
// # Safety
// `code` must be a live handle; `classification_json` must be valid for
// writes.
int32_t diffam_code_classify(const struct DiffamCode *code, char **classification_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIFFAM_H */
