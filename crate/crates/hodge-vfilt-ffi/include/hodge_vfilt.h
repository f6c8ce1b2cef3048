#ifndef HODGE_VFILT_H
#define HODGE_VFILT_H

/* Generated by cbindgen from hodge-vfilt-ffi; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a library call.
typedef enum HvfStatus {
  // The call succeeded and every out-parameter is filled.
  HVF_STATUS_OK = 0,
  // A required pointer argument was null.
  HVF_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  HVF_STATUS_INVALID_UTF8 = 2,
  // The input failed JSON or schema checks.
  HVF_STATUS_SCHEMA = 3,
  // The input was well formed but violates a mathematical rule.
  HVF_STATUS_DOMAIN = 4,
  // A panic was caught at the boundary.
  HVF_STATUS_PANIC = 5,
} HvfStatus;

// Opaque handle to a parsed model document.
typedef struct HvfModel HvfModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string. Do not free.
const char *hvf_version(void);

// Message for the most recent failure on this thread, or null when the
// last call succeeded. The caller owns the returned string.
char *hvf_last_error_message(void);

// Releases a string returned by this library. Null is a no-op.
//
// # Safety
// `s` must be a pointer previously returned by this library and not yet
// freed.
void hvf_string_free(char *s);

// Parses a model document and checks its schema. Rule validation is
// separate; see [`hvf_model_validate`].
//
// # Safety
// `json` must be NUL-terminated; `out` must point to writable storage
// for one pointer. On `Ok` the caller owns the handle and releases it
// with [`hvf_model_free`].
enum HvfStatus hvf_model_parse(const char *json, struct HvfModel **out);

// Releases a model handle. Null is a no-op.
//
// # Safety
// `m` must come from [`hvf_model_parse`] and not be used afterwards.
void hvf_model_free(struct HvfModel *m);

// Serializes the model back to its document form.
//
// # Safety
// `m` must be a live handle; `out` must point to writable storage for
// one pointer.
enum HvfStatus hvf_model_json(const struct HvfModel *m, char **out);

// Runs rule validation and writes the report. A report with violations
// still returns `Ok`; the report itself is the result.
//
// # Safety
// `m` must be a live handle; `out` must point to writable storage for
// one pointer.
enum HvfStatus hvf_model_validate(const struct HvfModel *m, char **out);

// Classifies both restriction complexes at every jump grade of a valid
// model and writes the scan rows.
//
// # Safety
// `m` must be a live handle; `out` must point to writable storage for
// one pointer.
enum HvfStatus hvf_model_scan(const struct HvfModel *m, char **out);

// Computes the cohomology of one restriction complex of a valid model at
// the given level: the graded complex, or the cumulative one when
// `cumulative` is true.
//
// # Safety
// `m` must be a live handle; `level` must be NUL-terminated; `out` must
// point to writable storage for one pointer.
enum HvfStatus hvf_model_complex(const struct HvfModel *m,
                                 const char *level,
                                 bool cumulative,
                                 char **out);

// Computes the cohomology of the vertex restriction of a valid model,
// with its Hodge and weight data.
//
// # Safety
// `m` must be a live handle; `out` must point to writable storage for
// one pointer.
enum HvfStatus hvf_model_restriction(const struct HvfModel *m, char **out);

// Local cohomology count of a valid model at Hodge level `p` with kernel
// power `ell + 1`.
//
// # Safety
// `m` must be a live handle; `out` must point to writable storage for
// one `size_t`.
enum HvfStatus hvf_model_local_count(const struct HvfModel *m,
                                     int64_t p,
                                     uint32_t ell,
                                     size_t *out);

// Classifies a weighted homogeneous complete intersection document and
// writes the classification report.
//
// # Safety
// `json` must be NUL-terminated; `out` must point to writable storage
// for one pointer.
enum HvfStatus hvf_classify(const char *json, char **out);

// Combines two root multiset documents with the additive convolution and
// writes the resulting multiset.
//
// # Safety
// `a` and `b` must be NUL-terminated; `out` must point to writable
// storage for one pointer.
enum HvfStatus hvf_roots_combine(const char *a, const char *b, char **out);

// Rescales a root multiset document by `factor` and then shifts every
// root by `shift`, writing the transformed multiset.
//
// # Safety
// `json` must be NUL-terminated; `out` must point to writable storage
// for one pointer.
enum HvfStatus hvf_roots_rescale(const char *json, uint64_t factor, int64_t shift, char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HODGE_VFILT_H */
