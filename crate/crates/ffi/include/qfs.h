/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef QFS_H
#define QFS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QfsStatus {
  QFS_STATUS_OK = 0,
  QFS_STATUS_NULL_POINTER = 1,
  QFS_STATUS_INVALID_ARGUMENT = 2,
  QFS_STATUS_IO = 3,
  QFS_STATUS_MALFORMED = 4,
  QFS_STATUS_TOO_LARGE = 5,
  QFS_STATUS_UNREACHABLE_K = 6,
  QFS_STATUS_NON_MONOTONE = 7,
  QFS_STATUS_BUFFER_TOO_SMALL = 8,
  QFS_STATUS_NUMERICAL = 9,
  QFS_STATUS_PANIC = 10,
} QfsStatus;

typedef enum QfsMuPolicy {
  /**
   * μ is the largest entry of `Q(α)` before substitution.
   */
  QFS_MU_POLICY_MAX_ENTRY = 0,
  /**
   * μ is the supplied value.
   */
  QFS_MU_POLICY_FIXED = 1,
} QfsMuPolicy;

typedef enum QfsExportFormat {
  QFS_EXPORT_FORMAT_JSON = 0,
  QFS_EXPORT_FORMAT_COORDINATE_LIST = 1,
} QfsExportFormat;

typedef enum QfsSolverKind {
  QFS_SOLVER_KIND_EXHAUSTIVE = 0,
  QFS_SOLVER_KIND_ANNEALING = 1,
  QFS_SOLVER_KIND_TABU_DECOMPOSITION = 2,
} QfsSolverKind;

typedef struct QfsDataset QfsDataset;

typedef struct QfsMutualInformation QfsMutualInformation;

typedef struct QfsQubo QfsQubo;

/**
 * Solver settings; obtain defaults from [`qfs_solver_config_default`].
 */
typedef struct QfsSolverConfig {
  enum QfsSolverKind kind;
  size_t shots;
  uint64_t seed;
  size_t sweeps;
  size_t subproblem_size;
  size_t tenure;
  size_t stall_rounds;
} QfsSolverConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null if none occurred. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *qfs_last_error_message(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not have been freed; null is ignored.
 */
void qfs_string_free(char *s);

/**
 * Loads a headered CSV. `label` names the label column by header or
 * 0-based index; null selects the last column.
 *
 * # Safety
 * `path` and a non-null `label` must be nul-terminated strings; `out` must be
 * writable.
 */
enum QfsStatus qfs_dataset_load_csv(const char *path, const char *label, struct QfsDataset **out);

/**
 * Generates a synthetic dataset. When `informative` is non-null its first
 * `d_inf` entries receive the informative feature indices.
 *
 * # Safety
 * `out` must be writable; a non-null `informative` must hold `d_inf` values.
 */
enum QfsStatus qfs_dataset_gen_synth(size_t n,
                                     size_t d_inf,
                                     size_t n_samples,
                                     uint64_t seed,
                                     struct QfsDataset **out,
                                     size_t *informative);

/**
 * # Safety
 * `d` must be a live dataset handle or null (which yields 0).
 */
size_t qfs_dataset_n_features(const struct QfsDataset *d);

/**
 * # Safety
 * `d` must be a live dataset handle or null (which yields 0).
 */
size_t qfs_dataset_n_samples(const struct QfsDataset *d);

/**
 * # Safety
 * `d` must come from this library and not have been freed; null is ignored.
 */
void qfs_dataset_free(struct QfsDataset *d);

/**
 * Bins every feature into `n_bins` quantile bins and measures importance
 * and redundancy.
 *
 * # Safety
 * `d` must be a live dataset handle; `out` must be writable.
 */
enum QfsStatus qfs_mi_compute(const struct QfsDataset *d,
                              size_t n_bins,
                              struct QfsMutualInformation **out);

/**
 * Wraps caller-supplied importance (`n` values) and redundancy (`n×n`).
 *
 * # Safety
 * `importance` must hold `n` values and `redundancy` `n*n`; `out` must be
 * writable.
 */
enum QfsStatus qfs_mi_from_arrays(size_t n,
                                  const double *importance,
                                  const double *redundancy,
                                  struct QfsMutualInformation **out);

/**
 * # Safety
 * `mi` must be a live handle or null (which yields 0).
 */
size_t qfs_mi_n(const struct QfsMutualInformation *mi);

/**
 * Copies the `n` importance values into `out`.
 *
 * # Safety
 * `mi` must be a live handle; `out` must hold `len` values.
 */
enum QfsStatus qfs_mi_importance(const struct QfsMutualInformation *mi, double *out, size_t len);

/**
 * Copies the `n×n` redundancy matrix into `out`, row-major.
 *
 * # Safety
 * `mi` must be a live handle; `out` must hold `len` values.
 */
enum QfsStatus qfs_mi_redundancy(const struct QfsMutualInformation *mi, double *out, size_t len);

/**
 * # Safety
 * `mi` must come from this library and not have been freed; null is ignored.
 */
void qfs_mi_free(struct QfsMutualInformation *mi);

/**
 * `Q(α)` without the ε/μ substitution.
 *
 * # Safety
 * `mi` must be a live handle; `out` must be writable.
 */
enum QfsStatus qfs_qubo_build(const struct QfsMutualInformation *mi,
                              double alpha,
                              struct QfsQubo **out);

/**
 * `Q(α)` with every diagonal whose `α·Iᵢ < epsilon` replaced by μ. `mu` is
 * read only for [`QfsMuPolicy::Fixed`].
 *
 * # Safety
 * `mi` must be a live handle; `out` must be writable.
 */
enum QfsStatus qfs_qubo_build_thresholded(const struct QfsMutualInformation *mi,
                                          double alpha,
                                          double epsilon,
                                          enum QfsMuPolicy policy,
                                          double mu,
                                          struct QfsQubo **out);

/**
 * A QUBO from a symmetric dense `n×n` matrix and constant offset.
 *
 * # Safety
 * `values` must hold `n*n` values; `out` must be writable.
 */
enum QfsStatus qfs_qubo_from_dense(size_t n,
                                   const double *values,
                                   double offset,
                                   struct QfsQubo **out);

/**
 * # Safety
 * `q` must be a live handle or null (which yields 0).
 */
size_t qfs_qubo_n(const struct QfsQubo *q);

/**
 * `xᵀQx + offset`.
 *
 * # Safety
 * `q` must be a live handle, `x` must hold `len` bytes, `energy` writable.
 */
enum QfsStatus qfs_qubo_energy(const struct QfsQubo *q,
                               const uint8_t *x,
                               size_t len,
                               double *energy);

/**
 * Ising form over spins `s = 1 − 2x`: couplings `a` (symmetric `n×n`, zero
 * diagonal, each unordered pair counted once), fields `b` and offset `c`.
 *
 * # Safety
 * `q` must be a live handle; `a` must hold `a_len` values, `b` `b_len`, and
 * `c` must be writable.
 */
enum QfsStatus qfs_qubo_to_ising(const struct QfsQubo *q,
                                 double *a,
                                 size_t a_len,
                                 double *b,
                                 size_t b_len,
                                 double *c);

/**
 * Serializes the QUBO; release the string with [`qfs_string_free`].
 *
 * # Safety
 * `q` must be a live handle; `out` must be writable.
 */
enum QfsStatus qfs_qubo_export(const struct QfsQubo *q, enum QfsExportFormat format, char **out);

/**
 * Parses text written by [`qfs_qubo_export`].
 *
 * # Safety
 * `text` must be nul-terminated; `out` must be writable.
 */
enum QfsStatus qfs_qubo_import(const char *text, enum QfsExportFormat format, struct QfsQubo **out);

/**
 * # Safety
 * `q` must come from this library and not have been freed; null is ignored.
 */
void qfs_qubo_free(struct QfsQubo *q);

/**
 * Library defaults for `kind`.
 */
struct QfsSolverConfig qfs_solver_config_default(enum QfsSolverKind kind);

/**
 * Solves and reports the lowest-energy state over all shots.
 *
 * # Safety
 * `q` and `config` must be valid; `best_x` must hold `len` bytes and
 * `best_energy` must be writable.
 */
enum QfsStatus qfs_qubo_solve(const struct QfsQubo *q,
                              const struct QfsSolverConfig *config,
                              uint8_t *best_x,
                              size_t len,
                              double *best_energy);

/**
 * Searches α for a minimizer with exactly `k` features. On success writes
 * the α found and the selection bit vector.
 *
 * # Safety
 * `mi` and `config` must be valid; `x` must hold `len` bytes and `alpha`
 * must be writable.
 */
enum QfsStatus qfs_select_k(const struct QfsMutualInformation *mi,
                            size_t k,
                            const struct QfsSolverConfig *config,
                            double epsilon,
                            enum QfsMuPolicy policy,
                            double mu,
                            double *alpha,
                            uint8_t *x,
                            size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFS_H */
