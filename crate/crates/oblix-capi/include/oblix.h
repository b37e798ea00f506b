#ifndef OBLIX_H
#define OBLIX_H

/* Generated by cbindgen from the oblix-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared across the C surface.
 */
typedef enum OblixStatus {
  OBLIX_STATUS_OK = 0,
  OBLIX_STATUS_NULL_POINTER = 1,
  OBLIX_STATUS_INVALID_INPUT = 2,
  OBLIX_STATUS_AMBIENT_MISMATCH = 3,
  OBLIX_STATUS_SINGULAR_GRAM = 4,
  OBLIX_STATUS_INVALID_WEIGHT = 5,
  OBLIX_STATUS_INCOMPATIBLE = 6,
  OBLIX_STATUS_INVALID_PARAMETER = 7,
  OBLIX_STATUS_DEGENERATE_ANGLE = 8,
  OBLIX_STATUS_PRECONDITION_FAILED = 9,
  OBLIX_STATUS_TOO_LARGE = 10,
  OBLIX_STATUS_NOT_FULL_RANK = 11,
  OBLIX_STATUS_NUMERICAL_UNDERFLOW = 12,
  OBLIX_STATUS_NOT_A_FRAME = 13,
  OBLIX_STATUS_IDENTITY_VIOLATION = 14,
  OBLIX_STATUS_PARSE_ERROR = 15,
  OBLIX_STATUS_IO_ERROR = 16,
} OblixStatus;

/**
 * Opaque dense complex matrix handle.
 */
typedef struct OblixMatrix OblixMatrix;

/**
 * Opaque subspace handle (orthonormal column basis).
 */
typedef struct OblixSubspace OblixSubspace;

/**
 * Friedrichs/Dixmier angle data for a pair of subspaces.
 */
typedef struct OblixAnglePair {
  double friedrichs_cos;
  double dixmier_cos;
  double friedrichs_sin;
  size_t intersection_dim;
} OblixAnglePair;

/**
 * Enumerated and sampled weighted-projection bounds for a subspace.
 */
typedef struct OblixBoundReport {
  double max_over_q;
  double min_m_i;
  double k_constant;
  double sup_sampled;
} OblixBoundReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the most recent failure on this thread, or NULL when the
 * last call succeeded. The pointer stays valid until the next failing
 * call on the same thread; do not free it.
 */
const char *oblix_last_error_message(void);

/**
 * Creates a rows×cols matrix from interleaved complex entries
 * (`2 * rows * cols` doubles, row-major).
 *
 * # Safety
 * `entries` must point to `2 * rows * cols` readable doubles and `out`
 * must be a valid location for a pointer.
 */
enum OblixStatus oblix_matrix_new(size_t rows,
                                  size_t cols,
                                  const double *entries,
                                  struct OblixMatrix **out);

/**
 * # Safety
 * `matrix` must be a live handle from this library or NULL.
 */
void oblix_matrix_free(struct OblixMatrix *matrix);

/**
 * # Safety
 * `matrix` must be a live handle.
 */
size_t oblix_matrix_rows(const struct OblixMatrix *matrix);

/**
 * # Safety
 * `matrix` must be a live handle.
 */
size_t oblix_matrix_cols(const struct OblixMatrix *matrix);

/**
 * Reads one entry.
 *
 * # Safety
 * `matrix` must be a live handle; `re` and `im` must be writable.
 */
enum OblixStatus oblix_matrix_get(const struct OblixMatrix *matrix,
                                  size_t row,
                                  size_t col,
                                  double *re,
                                  double *im);

/**
 * Largest singular value.
 *
 * # Safety
 * `matrix` must be a live handle; `out` must be writable.
 */
enum OblixStatus oblix_operator_norm(const struct OblixMatrix *matrix, double *out);

/**
 * Moore-Penrose pseudoinverse with the given relative rank cutoff
 * (pass 0 for the default).
 *
 * # Safety
 * `matrix` must be a live handle; `out` must be a valid location.
 */
enum OblixStatus oblix_pinv(const struct OblixMatrix *matrix,
                            double rel_rank,
                            struct OblixMatrix **out);

/**
 * Subspace spanned by the columns of `matrix` (orthonormalized).
 *
 * # Safety
 * `matrix` must be a live handle; `out` must be a valid location.
 */
enum OblixStatus oblix_subspace_from_columns(const struct OblixMatrix *matrix,
                                             struct OblixSubspace **out);

/**
 * # Safety
 * `subspace` must be a live handle or NULL.
 */
void oblix_subspace_free(struct OblixSubspace *subspace);

/**
 * # Safety
 * `subspace` must be a live handle.
 */
size_t oblix_subspace_ambient_dim(const struct OblixSubspace *subspace);

/**
 * # Safety
 * `subspace` must be a live handle.
 */
size_t oblix_subspace_dim(const struct OblixSubspace *subspace);

/**
 * Friedrichs/Dixmier angles between two subspaces.
 *
 * # Safety
 * Both handles must be live; `out` must be writable.
 */
enum OblixStatus oblix_angle_pair(const struct OblixSubspace *m,
                                  const struct OblixSubspace *n,
                                  struct OblixAnglePair *out);

/**
 * Weighted projection A (A*DA)^{-1} A*D for a positive diagonal weight
 * (`weights`: one strictly positive double per row of A). On success
 * writes the projection matrix handle and, optionally, its operator norm.
 *
 * # Safety
 * `a` must be a live handle, `weights` must hold `rows(A)` doubles,
 * `out` must be a valid location; `norm_out` may be NULL.
 */
enum OblixStatus oblix_weighted_projection(const struct OblixMatrix *a,
                                           const double *weights,
                                           struct OblixMatrix **out,
                                           double *norm_out);

/**
 * Ljance-Ptak norm of an idempotent matrix (validated).
 *
 * # Safety
 * `matrix` must be a live handle; `out` must be writable.
 */
enum OblixStatus oblix_ljance_ptak_norm(const struct OblixMatrix *matrix, double *out);

/**
 * Stewart-O'Leary sweep: enumerated max ‖P_{Q,S}‖, min m_I, K and the
 * seeded sampled supremum estimate.
 *
 * # Safety
 * `subspace` must be a live handle; `out` must be writable.
 */
enum OblixStatus oblix_stewart_oleary(const struct OblixSubspace *subspace,
                                      size_t samples,
                                      uint64_t seed,
                                      struct OblixBoundReport *out);

/**
 * Optimal frame bounds of the synthesis matrix (columns are the frame
 * vectors).
 *
 * # Safety
 * `synthesis` must be a live handle; `lower` and `upper` must be
 * writable.
 */
enum OblixStatus oblix_frame_bounds(const struct OblixMatrix *synthesis,
                                    double *lower,
                                    double *upper);

/**
 * Riesz constant (exhaustive minimum over nonempty subfamilies) of the
 * frame given by its synthesis matrix.
 *
 * # Safety
 * `synthesis` must be a live handle; `out` must be writable.
 */
enum OblixStatus oblix_riesz_constant(const struct OblixMatrix *synthesis, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* OBLIX_H */
