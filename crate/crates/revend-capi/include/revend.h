/* C interface to the revend end-of-revolution classifier. */

#ifndef REVEND_H
#define REVEND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Pass as `kappa` to `revend_curve_file_new` when the file itself sets
// the model.
#define REVEND_KAPPA_FROM_FILE -2

// An end of revolution ready for classification. Opaque.
typedef struct RevendEnd RevendEnd;

// A finished classification. Opaque.
typedef struct RevendReport RevendReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last failure message on this thread; empty until a call fails.
// The pointer is invalidated by the next failing call on the thread.
const char *revend_last_error(void);

// Build an end from a catalog entry.
//
// `params` is a comma- or semicolon-separated list of `key=value`
// pairs, or null for defaults. On success writes a handle to `*out`
// and returns 0; otherwise returns the error code and leaves `*out`
// untouched.
//
// # Safety
// `name` and (when non-null) `params` must point to NUL-terminated
// strings; `out` must be a valid writable pointer.
int revend_catalog_new(const char *name, const char *params, struct RevendEnd **out);

// Build an end from a curve specification file.
//
// `kappa` is -1, 0 or 1, or `REVEND_KAPPA_FROM_FILE` (-2) when the
// file sets the model itself. Same output contract as
// `revend_catalog_new`.
//
// # Safety
// `path` must point to a NUL-terminated string; `out` must be a valid
// writable pointer.
int revend_curve_file_new(const char *path, int kappa, struct RevendEnd **out);

// Classify an end with the default configuration. On success writes a
// report handle to `*out` and returns 0.
//
// # Safety
// `end` must be a live handle from a `revend_*_new` call; `out` must
// be a valid writable pointer.
int revend_classify(const struct RevendEnd *end, struct RevendReport **out);

// Verdict of a report: 0 parabolic, 1 non-parabolic, 2 inconclusive;
// -1 on a null handle.
//
// # Safety
// `report` must be null or a live handle from `revend_classify`.
int revend_report_verdict(const struct RevendReport *report);

// Render a report as a JSON document (single-end, embedded config).
// Returns a heap string to release with `revend_string_free`, or null
// on failure.
//
// # Safety
// `report` must be a live handle from `revend_classify`.
char *revend_report_json(const struct RevendReport *report);

// Evaluate the warping function of an end at arc length `s`, writing
// the value to `*out`.
//
// # Safety
// `end` must be a live handle; `out` must be a valid writable pointer.
int revend_warp_eval(const struct RevendEnd *end, double s, double *out);

// Release an end handle. Null is a no-op.
//
// # Safety
// `end` must be null or a handle not freed before.
void revend_end_free(struct RevendEnd *end);

// Release a report handle. Null is a no-op.
//
// # Safety
// `report` must be null or a handle not freed before.
void revend_report_free(struct RevendReport *report);

// Release a string returned by `revend_report_json`. Null is a no-op.
//
// # Safety
// `text` must be null or a string this library returned, not freed
// before.
void revend_string_free(char *text);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* REVEND_H */
