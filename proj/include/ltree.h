/* C interface to the latent tree library.
 *
 * All objects are opaque handles created by the library and released with
 * the matching *_free function (passing NULL is allowed). Every fallible
 * call returns an ltree_status; on failure ltree_last_error() describes the
 * problem. The message is thread-local and stays valid until the next
 * failing call on the same thread.
 *
 * Matrices are exchanged row-major. Handles are immutable after creation
 * and may be shared between threads.
 */
#ifndef LTREE_H
#define LTREE_H

#include <stddef.h>
#include <stdint.h>

#if defined(LTREE_BUILDING_LIBRARY)
#define LTREE_API __attribute__((visibility("default")))
#else
#define LTREE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ltree_status {
  LTREE_OK = 0,
  LTREE_ERR_INVALID_ARGUMENT = 1,
  LTREE_ERR_DIMENSION = 2,
  LTREE_ERR_NOT_POSITIVE_DEFINITE = 3,
  LTREE_ERR_DEGENERATE_CORRELATION = 4,
  LTREE_ERR_RANK_DEFICIENT = 5,
  LTREE_ERR_CONFIG = 6,
  LTREE_ERR_IO = 7,
  LTREE_ERR_NUMERICAL = 8,
  LTREE_ERR_INTERNAL = 9
} ltree_status;

typedef enum ltree_stop_reason {
  LTREE_STOP_EPSILON = 0,
  LTREE_STOP_LMAX = 1
} ltree_stop_reason;

typedef struct ltree_matrix ltree_matrix;
typedef struct ltree_tree_result ltree_tree_result;
typedef struct ltree_em_trace ltree_em_trace;
typedef struct ltree_sweep_config ltree_sweep_config;
typedef struct ltree_sweep_result ltree_sweep_result;

LTREE_API const char* ltree_version(void);
LTREE_API const char* ltree_last_error(void);
LTREE_API const char* ltree_status_string(ltree_status status);

/* ---- matrices ---------------------------------------------------------- */

LTREE_API ltree_status ltree_matrix_create(size_t rows, size_t cols,
                                           const double* row_major,
                                           ltree_matrix** out);
LTREE_API ltree_status ltree_matrix_read_csv(const char* path, ltree_matrix** out);
LTREE_API ltree_status ltree_matrix_write_csv(const ltree_matrix* m,
                                              const char* path);
LTREE_API size_t ltree_matrix_rows(const ltree_matrix* m);
LTREE_API size_t ltree_matrix_cols(const ltree_matrix* m);
LTREE_API ltree_status ltree_matrix_get(const ltree_matrix* m, size_t row,
                                        size_t col, double* out);
/* Copies rows*cols values; `capacity` is the length of `row_major`. */
LTREE_API ltree_status ltree_matrix_copy(const ltree_matrix* m, double* row_major,
                                         size_t capacity);
LTREE_API void ltree_matrix_free(ltree_matrix* m);

/* ---- Gaussian measures ------------------------------------------------- */

/* KL(N(0, sigma0) || N(0, sigma1)) in nats. */
LTREE_API ltree_status ltree_kl_gaussian(const ltree_matrix* sigma0,
                                         const ltree_matrix* sigma1, double* out);
LTREE_API ltree_status ltree_mutual_information(const ltree_matrix* sigma,
                                                size_t u, size_t v, double* out);

/* ---- Chow-Liu ---------------------------------------------------------- */

LTREE_API ltree_status ltree_chow_liu(const ltree_matrix* sigma,
                                      ltree_tree_result** out);
/* Exhaustive search over all labeled trees; dimension at most 8. */
LTREE_API ltree_status ltree_brute_force_tree(const ltree_matrix* sigma,
                                              ltree_tree_result** out);
LTREE_API size_t ltree_tree_num_vertices(const ltree_tree_result* t);
LTREE_API size_t ltree_tree_num_edges(const ltree_tree_result* t);
LTREE_API ltree_status ltree_tree_edge(const ltree_tree_result* t, size_t k,
                                       size_t* u, size_t* v);
LTREE_API double ltree_tree_kl(const ltree_tree_result* t);
LTREE_API ltree_status ltree_tree_covariance(const ltree_tree_result* t,
                                             ltree_matrix** out);
LTREE_API void ltree_tree_result_free(ltree_tree_result* t);

/* ---- EM ---------------------------------------------------------------- */

/* One record per EM iterate. latent_kl is NaN without ground truth and
 * step_kl is NaN on the first iterate. */
typedef struct ltree_em_record {
  size_t index;
  double obs_kl;
  double latent_kl;
  double step_kl;
} ltree_em_record;

/* observations: one sample per row. ground_truth may be NULL. */
LTREE_API ltree_status ltree_run_em(const ltree_matrix* sigma0,
                                    const ltree_matrix* h, const ltree_matrix* d,
                                    const ltree_matrix* observations,
                                    const ltree_matrix* ground_truth,
                                    double epsilon, size_t l_max,
                                    ltree_em_trace** out);
LTREE_API size_t ltree_em_num_iterations(const ltree_em_trace* trace);
LTREE_API ltree_stop_reason ltree_em_stop_reason(const ltree_em_trace* trace);
LTREE_API size_t ltree_em_monotonicity_violations(const ltree_em_trace* trace);
LTREE_API ltree_status ltree_em_iteration(const ltree_em_trace* trace, size_t k,
                                          ltree_em_record* out);
LTREE_API ltree_status ltree_em_iteration_covariance(const ltree_em_trace* trace,
                                                     size_t k, ltree_matrix** out);
/* Writes 2*(p-1) vertex indices (u0, v0, u1, v1, ...) into `edges`. */
LTREE_API ltree_status ltree_em_iteration_edges(const ltree_em_trace* trace,
                                                size_t k, size_t* edges,
                                                size_t capacity);
LTREE_API void ltree_em_trace_free(ltree_em_trace* trace);

/* ---- synthetic data ---------------------------------------------------- */

LTREE_API ltree_status ltree_generate_ground_truth(size_t p, uint64_t seed,
                                                   ltree_matrix** out);
LTREE_API ltree_status ltree_generate_prior(const ltree_matrix* sigma,
                                            double alpha, uint64_t seed,
                                            ltree_matrix** out);
LTREE_API ltree_status ltree_generate_mixing(const ltree_matrix* sigma, size_t m,
                                             double snr_db, uint64_t seed,
                                             ltree_matrix** h, ltree_matrix** d);
LTREE_API ltree_status ltree_sample_observations(const ltree_matrix* h,
                                                 const ltree_matrix* d,
                                                 const ltree_matrix* sigma,
                                                 size_t r, uint64_t seed,
                                                 ltree_matrix** out);

/* ---- experiment sweep -------------------------------------------------- */

typedef struct ltree_sweep_summary {
  size_t m;
  size_t completed;
  size_t failed;
  double kl_em_mean, kl_em_std_error;
  double kl_prior_mean, kl_prior_std_error;
  double kl_oracle_mean, kl_oracle_std_error;
  double iterations_mean, iterations_std_error;
} ltree_sweep_summary;

LTREE_API ltree_status ltree_sweep_config_create(ltree_sweep_config** out);
/* Applies `key = value` lines from a file on top of the current values. */
LTREE_API ltree_status ltree_sweep_config_load(ltree_sweep_config* cfg,
                                               const char* path);
LTREE_API ltree_status ltree_sweep_config_set(ltree_sweep_config* cfg,
                                              const char* key, const char* value);
/* NUL-terminated value text; fails with LTREE_ERR_INVALID_ARGUMENT when
 * `capacity` is too small. */
LTREE_API ltree_status ltree_sweep_config_get(const ltree_sweep_config* cfg,
                                              const char* key, char* buffer,
                                              size_t capacity);
LTREE_API size_t ltree_sweep_config_key_count(void);
LTREE_API const char* ltree_sweep_config_key(size_t i);
LTREE_API void ltree_sweep_config_free(ltree_sweep_config* cfg);

LTREE_API ltree_status ltree_run_sweep(const ltree_sweep_config* cfg,
                                       ltree_sweep_result** out);
/* Writes <stem>.json and <stem>.csv. */
LTREE_API ltree_status ltree_sweep_result_write(const ltree_sweep_result* res,
                                                const char* stem);
LTREE_API size_t ltree_sweep_result_num_trials(const ltree_sweep_result* res);
LTREE_API size_t ltree_sweep_result_num_failures(const ltree_sweep_result* res);
LTREE_API size_t ltree_sweep_result_num_summaries(const ltree_sweep_result* res);
LTREE_API ltree_status ltree_sweep_result_summary(const ltree_sweep_result* res,
                                                  size_t i,
                                                  ltree_sweep_summary* out);
LTREE_API void ltree_sweep_result_free(ltree_sweep_result* res);

#ifdef __cplusplus
}
#endif

#endif /* LTREE_H */
