/* Generated by cbindgen. Do not edit. */

#ifndef SEMIPOS_H
#define SEMIPOS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SemiposStatus {
  SEMIPOS_STATUS_OK = 0,
  SEMIPOS_STATUS_NULL_POINTER = 1,
  SEMIPOS_STATUS_INVALID_UTF8 = 2,
  SEMIPOS_STATUS_PARSE = 3,
  SEMIPOS_STATUS_DIMENSION_MISMATCH = 4,
  SEMIPOS_STATUS_SINGULAR = 5,
  SEMIPOS_STATUS_CAPACITY = 6,
  SEMIPOS_STATUS_NOT_PROPER = 7,
  SEMIPOS_STATUS_HYPOTHESIS = 8,
  SEMIPOS_STATUS_INVALID_INPUT = 9,
  SEMIPOS_STATUS_VERIFICATION = 10,
  SEMIPOS_STATUS_PANIC = 11,
} SemiposStatus;

typedef enum SemiposSpKind {
  SEMIPOS_SP_KIND_SEMIPOSITIVE = 0,
  SEMIPOS_SP_KIND_NOT_SEMIPOSITIVE = 1,
} SemiposSpKind;

typedef enum SemiposMspKind {
  SEMIPOS_MSP_KIND_MINIMAL = 0,
  SEMIPOS_MSP_KIND_REDUNDANT = 1,
  SEMIPOS_MSP_KIND_NOT_SEMIPOSITIVE = 2,
} SemiposMspKind;

typedef enum SemiposFactorKind {
  SEMIPOS_FACTOR_KIND_NONE = 0,
  SEMIPOS_FACTOR_KIND_STANDARD = 1,
  SEMIPOS_FACTOR_KIND_TRANSPOSED = 2,
} SemiposFactorKind;

/**
 * Opaque polyhedral cone.
 */
typedef struct SemiposCone SemiposCone;

/**
 * Opaque linear map on matrices.
 */
typedef struct SemiposMap SemiposMap;

/**
 * Opaque exact rational matrix.
 */
typedef struct SemiposMatrix SemiposMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *semipos_last_error(void);

/**
 * Library version as a static string.
 */
const char *semipos_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void semipos_string_free(char *s);

/**
 * Parses the matrix text format (rows of `p` or `p/q` entries).
 *
 * # Safety
 * `text_ptr` must be a NUL-terminated string and `result` a valid pointer.
 */
enum SemiposStatus semipos_matrix_parse(const char *text_ptr, struct SemiposMatrix **result);

/**
 * # Safety
 * `m` must be null or a handle from this library, not yet freed.
 */
void semipos_matrix_free(struct SemiposMatrix *m);

/**
 * # Safety
 * `m` must be a live matrix handle.
 */
size_t semipos_matrix_rows(const struct SemiposMatrix *m);

/**
 * # Safety
 * `m` must be a live matrix handle.
 */
size_t semipos_matrix_cols(const struct SemiposMatrix *m);

/**
 * Renders the matrix in the text format; free with `semipos_string_free`.
 *
 * # Safety
 * `m` must be a live matrix handle.
 */
char *semipos_matrix_to_text(const struct SemiposMatrix *m);

/**
 * Parses the cone text format (`dim n` header, one generator per line).
 *
 * # Safety
 * `text_ptr` must be a NUL-terminated string and `result` a valid pointer.
 */
enum SemiposStatus semipos_cone_parse(const char *text_ptr, struct SemiposCone **result);

/**
 * The nonnegative orthant of `R^dim`, or null when `dim` is zero.
 */
struct SemiposCone *semipos_cone_orthant(size_t dim);

/**
 * # Safety
 * `k` must be null or a handle from this library, not yet freed.
 */
void semipos_cone_free(struct SemiposCone *k);

/**
 * # Safety
 * `k` must be a live cone handle.
 */
size_t semipos_cone_dim(const struct SemiposCone *k);

/**
 * Parses the linear-map text format (`shape m n` header, then the
 * `mn×mn` matrix acting on column-stacked vectors).
 *
 * # Safety
 * `text_ptr` must be a NUL-terminated string and `result` a valid pointer.
 */
enum SemiposStatus semipos_map_parse(const char *text_ptr, struct SemiposMap **result);

/**
 * The map `A ↦ X·A·Y`.
 *
 * # Safety
 * `x`, `y` must be live matrix handles and `result` a valid pointer.
 */
enum SemiposStatus semipos_map_from_xay(const struct SemiposMatrix *x,
                                        const struct SemiposMatrix *y,
                                        struct SemiposMap **result);

/**
 * # Safety
 * `l` must be null or a handle from this library, not yet freed.
 */
void semipos_map_free(struct SemiposMap *l);

/**
 * Applies the map to a matrix.
 *
 * # Safety
 * `l`, `a` must be live handles and `result` a valid pointer.
 */
enum SemiposStatus semipos_map_apply(const struct SemiposMap *l,
                                     const struct SemiposMatrix *a,
                                     struct SemiposMatrix **result);

/**
 * Decides semipositivity of `a` over `(k1, k2)`. `vector` receives the
 * witness or the Farkas certificate as space-separated rationals.
 *
 * # Safety
 * `a` must be a live matrix handle, cones live handles or null, and the
 * outputs valid pointers.
 */
enum SemiposStatus semipos_classify_sp(const struct SemiposMatrix *a,
                                       const struct SemiposCone *k1,
                                       const struct SemiposCone *k2,
                                       enum SemiposSpKind *kind,
                                       char **vector);

/**
 * Decides minimal semipositivity. `evidence` receives the left inverse as
 * matrix text for `Minimal`, else the witness or certificate vector.
 *
 * # Safety
 * As for `semipos_classify_sp`.
 */
enum SemiposStatus semipos_classify_msp(const struct SemiposMatrix *a,
                                        const struct SemiposCone *k1,
                                        const struct SemiposCone *k2,
                                        enum SemiposMspKind *kind,
                                        char **evidence);

/**
 * Factors the map as `A ↦ sign·X·A·Y` or `A ↦ sign·X·Aᵀ·Y`. When no
 * factorization exists `kind` is `NONE` and the other outputs are untouched.
 *
 * # Safety
 * `l` must be a live map handle and the outputs valid pointers.
 */
enum SemiposStatus semipos_map_factor(const struct SemiposMap *l,
                                      enum SemiposFactorKind *kind,
                                      struct SemiposMatrix **x,
                                      struct SemiposMatrix **y,
                                      int32_t *sign);

/**
 * Searches `trials` seeded samples for a semipositive `A` whose image is
 * not semipositive. On success `found` is set and `counterexample`
 * receives `A` (its index in `trial`); otherwise `counterexample` is null.
 *
 * # Safety
 * `l` must be a live map handle, cones live or null, outputs valid.
 */
enum SemiposStatus semipos_falsify(const struct SemiposMap *l,
                                   const struct SemiposCone *k1,
                                   const struct SemiposCone *k2,
                                   uint64_t trials,
                                   uint64_t seed,
                                   bool *found,
                                   uint64_t *trial,
                                   struct SemiposMatrix **counterexample);

/**
 * Runs the full preserver analysis and returns the report as JSON, in the
 * same shape the command-line tool prints.
 *
 * # Safety
 * `l` must be a live map handle, cones live or null, `report` valid.
 */
enum SemiposStatus semipos_analyze(const struct SemiposMap *l,
                                   const struct SemiposCone *k1,
                                   const struct SemiposCone *k2,
                                   uint64_t trials,
                                   uint64_t seed,
                                   char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMIPOS_H */
