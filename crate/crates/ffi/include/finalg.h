#ifndef FINALG_H
#define FINALG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum FinalgStatus {
  FINALG_STATUS_OK = 0,
  FINALG_STATUS_NULL_POINTER = 1,
  FINALG_STATUS_INVALID_UTF8 = 2,
  FINALG_STATUS_PARSE_ERROR = 3,
  FINALG_STATUS_COMPUTATION_ERROR = 4,
  FINALG_STATUS_OUT_OF_RANGE = 5,
  FINALG_STATUS_PANIC = 6,
} FinalgStatus;

/*
 A finite-dimensional algebra with structure constants over the rationals.
 */
typedef struct FinalgAlgebra FinalgAlgebra;

/*
 A parsed workspace document.
 */
typedef struct FinalgWorkspace FinalgWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread; empty after a success.
 Valid until the next call on the same thread.
 */
const char *finalg_last_error(void);

/*
 Library version as a static string.
 */
const char *finalg_version(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void finalg_string_free(char *s);

/*
 The Green algebra `G_k`.

 # Safety
 `out` must be valid for writes.
 */
enum FinalgStatus finalg_algebra_green(size_t k, struct FinalgAlgebra **out);

/*
 The Kronecker algebra with `n` arrows in degree 0.

 # Safety
 `out` must be valid for writes.
 */
enum FinalgStatus finalg_algebra_kronecker(size_t n, struct FinalgAlgebra **out);

/*
 `R_F` for a seeded family of `m` subspace pairs of dimension `k` and `n - k` in `Q^n`.

 # Safety
 `out` must be valid for writes.
 */
enum FinalgStatus finalg_algebra_rfamily(size_t n,
                                         size_t m,
                                         size_t k,
                                         uint64_t seed,
                                         struct FinalgAlgebra **out);

/*
 A DG algebra whose Euler matrix is the given `n x n` matrix in `SL(n, Z)`,
 read row-major from `entries`.

 # Safety
 `entries` must point to `n * n` readable values and `out` must be valid for writes.
 */
enum FinalgStatus finalg_algebra_realize(const int64_t *entries,
                                         size_t n,
                                         struct FinalgAlgebra **out);

/*
 Reads an algebra from its JSON form.

 # Safety
 `json` must be a nul-terminated string and `out` valid for writes.
 */
enum FinalgStatus finalg_algebra_from_json(const char *json, struct FinalgAlgebra **out);

/*
 Writes the JSON form of an algebra to `*out`; release it with [`finalg_string_free`].

 # Safety
 `a` must be a live handle and `out` valid for writes.
 */
enum FinalgStatus finalg_algebra_to_json(const struct FinalgAlgebra *a, char **out);

/*
 Releases an algebra. Null is ignored.

 # Safety
 `a` must come from this library and not have been freed.
 */
void finalg_algebra_free(struct FinalgAlgebra *a);

/*
 Dimension over the rationals.

 # Safety
 `a` must be a live handle and `out` valid for writes.
 */
enum FinalgStatus finalg_algebra_dim(const struct FinalgAlgebra *a, size_t *out);

/*
 Number of vertex idempotents.

 # Safety
 `a` must be a live handle and `out` valid for writes.
 */
enum FinalgStatus finalg_algebra_vertex_count(const struct FinalgAlgebra *a, size_t *out);

/*
 Global dimension by minimal resolutions of the simples, truncated at `bound`.
 `*finite` is false when some resolution reached the bound; `*dim` is then the bound.

 # Safety
 `a` must be a live handle; `dim` and `finite` must be valid for writes.
 */
enum FinalgStatus finalg_algebra_gldim(const struct FinalgAlgebra *a,
                                       size_t bound,
                                       size_t *dim,
                                       bool *finite);

/*
 Writes the Euler matrix row-major into `out`, which holds `len` entries.
 Fails with `OUT_OF_RANGE` when `len` is smaller than N*N or an entry does not fit.

 # Safety
 `a` must be a live handle and `out` valid for `len` writes.
 */
enum FinalgStatus finalg_algebra_chi(const struct FinalgAlgebra *a, int64_t *out, size_t len);

/*
 Whether the form `a x^2 + b xy + c y^2` takes the value 1 on integers.

 # Safety
 `out` must be valid for writes.
 */
enum FinalgStatus finalg_represents_one(int64_t a, int64_t b, int64_t c, bool *out);

/*
 Parses a workspace document. On `PARSE_ERROR` the message starts with `line:col:`.

 # Safety
 `src` must be a nul-terminated string and `out` valid for writes.
 */
enum FinalgStatus finalg_workspace_parse(const char *src, struct FinalgWorkspace **out);

/*
 Runs a workspace and writes the JSON report to `*out`. `command` may be null
 to run the document's own commands. The report is written also when a
 command fails, in which case the status is `COMPUTATION_ERROR`.

 # Safety
 `ws` must be a live handle, `command` null or a nul-terminated string, and
 `out` valid for writes.
 */
enum FinalgStatus finalg_workspace_run(const struct FinalgWorkspace *ws,
                                       const char *command,
                                       char **out);

/*
 Releases a workspace. Null is ignored.

 # Safety
 `ws` must come from this library and not have been freed.
 */
void finalg_workspace_free(struct FinalgWorkspace *ws);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FINALG_H */
