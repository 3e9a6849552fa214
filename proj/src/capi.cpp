#include "ltree.h"

#include "ltree/chow_liu.hpp"
#include "ltree/csv.hpp"
#include "ltree/em_mst.hpp"
#include "ltree/error.hpp"
#include "ltree/experiment.hpp"
#include "ltree/gaussian.hpp"
#include "ltree/linear_model.hpp"
#include "ltree/results.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

struct ltree_matrix {
  ltree::Matrix value;
};

struct ltree_tree_result {
  ltree::TreeApproxResult value;
};

struct ltree_em_trace {
  ltree::EmTrace value;
};

struct ltree_sweep_config {
  ltree::ExperimentConfig value;
};

struct ltree_sweep_result {
  ltree::SweepResult value;
};

namespace {

thread_local std::string last_error;

ltree_status to_status(ltree::ErrorCode code) {
  using ltree::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return LTREE_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return LTREE_ERR_DIMENSION;
    case ErrorCode::NotPositiveDefinite: return LTREE_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::DegenerateCorrelation: return LTREE_ERR_DEGENERATE_CORRELATION;
    case ErrorCode::RankDeficient: return LTREE_ERR_RANK_DEFICIENT;
    case ErrorCode::Config: return LTREE_ERR_CONFIG;
    case ErrorCode::Io: return LTREE_ERR_IO;
    case ErrorCode::Numerical: return LTREE_ERR_NUMERICAL;
    case ErrorCode::Internal: return LTREE_ERR_INTERNAL;
  }
  return LTREE_ERR_INTERNAL;
}

template <class F>
ltree_status guarded(F&& body) noexcept {
  try {
    body();
    return LTREE_OK;
  } catch (const ltree::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LTREE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LTREE_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (!p) {
    throw ltree::Error(ltree::ErrorCode::InvalidArgument,
                       std::string(name) + " must not be NULL");
  }
}

ltree::CovMatrix cov(const ltree_matrix* m, const char* name) {
  require(m, name);
  try {
    return ltree::CovMatrix(m->value);
  } catch (const ltree::Error& e) {
    throw ltree::Error(e.code(), std::string(name) + ": " + e.what());
  }
}

ltree_matrix* wrap(ltree::Matrix m) { return new ltree_matrix{std::move(m)}; }

double or_nan(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

const ltree::EmIteration& iteration(const ltree_em_trace* trace, std::size_t k) {
  require(trace, "trace");
  if (k >= trace->value.iterations.size()) {
    throw ltree::Error(ltree::ErrorCode::InvalidArgument,
                       "iteration index out of range");
  }
  return trace->value.iterations[k];
}

}  // namespace

extern "C" {

const char* ltree_version(void) { return LTREE_VERSION; }

const char* ltree_last_error(void) { return last_error.c_str(); }

const char* ltree_status_string(ltree_status status) {
  switch (status) {
    case LTREE_OK: return "ok";
    case LTREE_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LTREE_ERR_DIMENSION: return "dimension mismatch";
    case LTREE_ERR_NOT_POSITIVE_DEFINITE: return "not positive definite";
    case LTREE_ERR_DEGENERATE_CORRELATION: return "degenerate correlation";
    case LTREE_ERR_RANK_DEFICIENT: return "rank deficient";
    case LTREE_ERR_CONFIG: return "configuration error";
    case LTREE_ERR_IO: return "i/o error";
    case LTREE_ERR_NUMERICAL: return "numerical failure";
    case LTREE_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

ltree_status ltree_matrix_create(size_t rows, size_t cols, const double* row_major,
                                 ltree_matrix** out) {
  return guarded([&] {
    require(out, "out");
    require(row_major, "row_major");
    if (rows == 0 || cols == 0) {
      throw ltree::Error(ltree::ErrorCode::InvalidArgument, "matrix must be non-empty");
    }
    ltree::Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i) {
      for (size_t j = 0; j < cols; ++j) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            row_major[i * cols + j];
      }
    }
    *out = wrap(std::move(m));
  });
}

ltree_status ltree_matrix_read_csv(const char* path, ltree_matrix** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(ltree::read_matrix_csv(path));
  });
}

ltree_status ltree_matrix_write_csv(const ltree_matrix* m, const char* path) {
  return guarded([&] {
    require(m, "matrix");
    require(path, "path");
    ltree::write_matrix_csv(path, m->value);
  });
}

size_t ltree_matrix_rows(const ltree_matrix* m) {
  return m ? static_cast<size_t>(m->value.rows()) : 0;
}

size_t ltree_matrix_cols(const ltree_matrix* m) {
  return m ? static_cast<size_t>(m->value.cols()) : 0;
}

ltree_status ltree_matrix_get(const ltree_matrix* m, size_t row, size_t col,
                              double* out) {
  return guarded([&] {
    require(m, "matrix");
    require(out, "out");
    if (row >= ltree_matrix_rows(m) || col >= ltree_matrix_cols(m)) {
      throw ltree::Error(ltree::ErrorCode::InvalidArgument, "index out of range");
    }
    *out = m->value(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  });
}

ltree_status ltree_matrix_copy(const ltree_matrix* m, double* row_major,
                               size_t capacity) {
  return guarded([&] {
    require(m, "matrix");
    require(row_major, "row_major");
    const size_t rows = ltree_matrix_rows(m), cols = ltree_matrix_cols(m);
    if (capacity < rows * cols) {
      throw ltree::Error(ltree::ErrorCode::InvalidArgument, "buffer too small");
    }
    for (size_t i = 0; i < rows; ++i) {
      for (size_t j = 0; j < cols; ++j) {
        row_major[i * cols + j] =
            m->value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  });
}

void ltree_matrix_free(ltree_matrix* m) { delete m; }

ltree_status ltree_kl_gaussian(const ltree_matrix* sigma0, const ltree_matrix* sigma1,
                               double* out) {
  return guarded([&] {
    require(out, "out");
    *out = ltree::kl_gaussian(cov(sigma0, "sigma0"), cov(sigma1, "sigma1"));
  });
}

ltree_status ltree_mutual_information(const ltree_matrix* sigma, size_t u, size_t v,
                                      double* out) {
  return guarded([&] {
    require(out, "out");
    *out = ltree::pairwise_mutual_information(cov(sigma, "sigma"), u, v);
  });
}

ltree_status ltree_chow_liu(const ltree_matrix* sigma, ltree_tree_result** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ltree_tree_result{ltree::chow_liu(cov(sigma, "sigma"))};
  });
}

ltree_status ltree_brute_force_tree(const ltree_matrix* sigma,
                                    ltree_tree_result** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ltree_tree_result{ltree::brute_force_optimal_tree(cov(sigma, "sigma"))};
  });
}

size_t ltree_tree_num_vertices(const ltree_tree_result* t) {
  return t ? t->value.tree.num_vertices() : 0;
}

size_t ltree_tree_num_edges(const ltree_tree_result* t) {
  return t ? t->value.tree.edges().size() : 0;
}

ltree_status ltree_tree_edge(const ltree_tree_result* t, size_t k, size_t* u,
                             size_t* v) {
  return guarded([&] {
    require(t, "tree");
    require(u, "u");
    require(v, "v");
    const auto& edges = t->value.tree.edges();
    if (k >= edges.size()) {
      throw ltree::Error(ltree::ErrorCode::InvalidArgument, "edge index out of range");
    }
    *u = edges[k].first;
    *v = edges[k].second;
  });
}

double ltree_tree_kl(const ltree_tree_result* t) {
  return t ? t->value.kl : std::numeric_limits<double>::quiet_NaN();
}

ltree_status ltree_tree_covariance(const ltree_tree_result* t, ltree_matrix** out) {
  return guarded([&] {
    require(t, "tree");
    require(out, "out");
    *out = wrap(t->value.cov.matrix());
  });
}

void ltree_tree_result_free(ltree_tree_result* t) { delete t; }

ltree_status ltree_run_em(const ltree_matrix* sigma0, const ltree_matrix* h,
                          const ltree_matrix* d, const ltree_matrix* observations,
                          const ltree_matrix* ground_truth, double epsilon,
                          size_t l_max, ltree_em_trace** out) {
  return guarded([&] {
    require(out, "out");
    require(h, "h");
    require(observations, "observations");
    const ltree::LinearModel model(h->value, cov(d, "d"));
    const ltree::ObservationSet obs(observations->value);
    std::optional<ltree::CovMatrix> truth;
    if (ground_truth) truth = cov(ground_truth, "ground_truth");
    const ltree::EmConfig config{cov(sigma0, "sigma0"), epsilon, l_max};
    *out = new ltree_em_trace{ltree::run_em(config, model, obs, truth)};
  });
}

size_t ltree_em_num_iterations(const ltree_em_trace* trace) {
  return trace ? trace->value.iterations.size() : 0;
}

ltree_stop_reason ltree_em_stop_reason(const ltree_em_trace* trace) {
  return trace && trace->value.stop_reason == ltree::StopReason::EpsilonReached
             ? LTREE_STOP_EPSILON
             : LTREE_STOP_LMAX;
}

size_t ltree_em_monotonicity_violations(const ltree_em_trace* trace) {
  return trace ? trace->value.monotonicity_violations : 0;
}

ltree_status ltree_em_iteration(const ltree_em_trace* trace, size_t k,
                                ltree_em_record* out) {
  return guarded([&] {
    require(out, "out");
    const auto& it = iteration(trace, k);
    *out = {it.index, it.obs_kl, or_nan(it.latent_kl), or_nan(it.step_kl)};
  });
}

ltree_status ltree_em_iteration_covariance(const ltree_em_trace* trace, size_t k,
                                           ltree_matrix** out) {
  return guarded([&] {
    require(out, "out");
    *out = wrap(iteration(trace, k).sigma_tree.matrix());
  });
}

ltree_status ltree_em_iteration_edges(const ltree_em_trace* trace, size_t k,
                                      size_t* edges, size_t capacity) {
  return guarded([&] {
    require(edges, "edges");
    const auto& tree_edges = iteration(trace, k).tree.edges();
    if (capacity < 2 * tree_edges.size()) {
      throw ltree::Error(ltree::ErrorCode::InvalidArgument, "buffer too small");
    }
    for (size_t e = 0; e < tree_edges.size(); ++e) {
      edges[2 * e] = tree_edges[e].first;
      edges[2 * e + 1] = tree_edges[e].second;
    }
  });
}

void ltree_em_trace_free(ltree_em_trace* trace) { delete trace; }

ltree_status ltree_generate_ground_truth(size_t p, uint64_t seed, ltree_matrix** out) {
  return guarded([&] {
    require(out, "out");
    *out = wrap(ltree::generate_ground_truth(p, seed).matrix());
  });
}

ltree_status ltree_generate_prior(const ltree_matrix* sigma, double alpha,
                                  uint64_t seed, ltree_matrix** out) {
  return guarded([&] {
    require(out, "out");
    *out = wrap(ltree::generate_prior(cov(sigma, "sigma"), alpha, seed).matrix());
  });
}

ltree_status ltree_generate_mixing(const ltree_matrix* sigma, size_t m, double snr_db,
                                   uint64_t seed, ltree_matrix** h, ltree_matrix** d) {
  return guarded([&] {
    require(h, "h");
    require(d, "d");
    const ltree::CovMatrix s = cov(sigma, "sigma");
    const auto model = ltree::generate_mixing(s.dim(), m, snr_db, s, seed);
    auto hm = std::make_unique<ltree_matrix>(ltree_matrix{model.h()});
    *d = wrap(model.d().matrix());
    *h = hm.release();
  });
}

ltree_status ltree_sample_observations(const ltree_matrix* h, const ltree_matrix* d,
                                       const ltree_matrix* sigma, size_t r,
                                       uint64_t seed, ltree_matrix** out) {
  return guarded([&] {
    require(out, "out");
    require(h, "h");
    const ltree::LinearModel model(h->value, cov(d, "d"));
    *out = wrap(
        ltree::sample_observations(model, cov(sigma, "sigma"), r, seed).samples());
  });
}

ltree_status ltree_sweep_config_create(ltree_sweep_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new ltree_sweep_config{};
  });
}

ltree_status ltree_sweep_config_load(ltree_sweep_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "config");
    require(path, "path");
    cfg->value = ltree::load_config(path, cfg->value);
  });
}

ltree_status ltree_sweep_config_set(ltree_sweep_config* cfg, const char* key,
                                    const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    cfg->value.set(key, value);
  });
}

ltree_status ltree_sweep_config_get(const ltree_sweep_config* cfg, const char* key,
                                    char* buffer, size_t capacity) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(buffer, "buffer");
    for (const auto& [k, v] : cfg->value.entries()) {
      if (k != key) continue;
      if (v.size() + 1 > capacity) {
        throw ltree::Error(ltree::ErrorCode::InvalidArgument, "buffer too small");
      }
      std::memcpy(buffer, v.c_str(), v.size() + 1);
      return;
    }
    throw ltree::Error(ltree::ErrorCode::Config,
                       std::string("unknown config key '") + key + "'");
  });
}

size_t ltree_sweep_config_key_count(void) {
  return ltree::ExperimentConfig::keys().size();
}

const char* ltree_sweep_config_key(size_t i) {
  const auto& keys = ltree::ExperimentConfig::keys();
  return i < keys.size() ? keys[i].c_str() : nullptr;
}

void ltree_sweep_config_free(ltree_sweep_config* cfg) { delete cfg; }

ltree_status ltree_run_sweep(const ltree_sweep_config* cfg, ltree_sweep_result** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = new ltree_sweep_result{ltree::run_sweep(cfg->value)};
  });
}

ltree_status ltree_sweep_result_write(const ltree_sweep_result* res, const char* stem) {
  return guarded([&] {
    require(res, "result");
    require(stem, "stem");
    ltree::emit_results(res->value, stem);
  });
}

size_t ltree_sweep_result_num_trials(const ltree_sweep_result* res) {
  return res ? res->value.trials.size() : 0;
}

size_t ltree_sweep_result_num_failures(const ltree_sweep_result* res) {
  return res ? res->value.failures.size() : 0;
}

size_t ltree_sweep_result_num_summaries(const ltree_sweep_result* res) {
  return res ? res->value.summaries.size() : 0;
}

ltree_status ltree_sweep_result_summary(const ltree_sweep_result* res, size_t i,
                                        ltree_sweep_summary* out) {
  return guarded([&] {
    require(res, "result");
    require(out, "out");
    if (i >= res->value.summaries.size()) {
      throw ltree::Error(ltree::ErrorCode::InvalidArgument, "summary index out of range");
    }
    const auto& s = res->value.summaries[i];
    *out = {s.m,
            s.completed,
            s.failed,
            s.kl_em.mean,
            s.kl_em.std_error,
            s.kl_prior.mean,
            s.kl_prior.std_error,
            s.kl_oracle.mean,
            s.kl_oracle.std_error,
            s.iterations.mean,
            s.iterations.std_error};
  });
}

void ltree_sweep_result_free(ltree_sweep_result* res) { delete res; }

}  // extern "C"
