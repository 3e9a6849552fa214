// Exercises the shared library through its C header only.
#include <ltree.h>

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace {

ltree_matrix* make(std::size_t rows, std::size_t cols, std::vector<double> v) {
  ltree_matrix* m = nullptr;
  REQUIRE(ltree_matrix_create(rows, cols, v.data(), &m) == LTREE_OK);
  return m;
}

}  // namespace

TEST_CASE("c api: status strings and version") {
  CHECK(std::string(ltree_version()).size() > 0);
  for (int s = LTREE_OK; s <= LTREE_ERR_INTERNAL; ++s)
    CHECK(std::strlen(ltree_status_string(static_cast<ltree_status>(s))) > 0);
}

TEST_CASE("c api: matrices") {
  ltree_matrix* m = make(2, 3, {1, 2, 3, 4, 5, 6});
  CHECK(ltree_matrix_rows(m) == 2);
  CHECK(ltree_matrix_cols(m) == 3);
  double x = 0;
  CHECK(ltree_matrix_get(m, 1, 0, &x) == LTREE_OK);
  CHECK(x == 4);
  CHECK(ltree_matrix_get(m, 2, 0, &x) == LTREE_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ltree_last_error()).size() > 0);
  double buf[6];
  CHECK(ltree_matrix_copy(m, buf, 5) == LTREE_ERR_INVALID_ARGUMENT);
  CHECK(ltree_matrix_copy(m, buf, 6) == LTREE_OK);
  CHECK(buf[5] == 6);

  const auto path = (std::filesystem::temp_directory_path() / "ltree_capi_m.csv").string();
  CHECK(ltree_matrix_write_csv(m, path.c_str()) == LTREE_OK);
  ltree_matrix* back = nullptr;
  CHECK(ltree_matrix_read_csv(path.c_str(), &back) == LTREE_OK);
  CHECK(ltree_matrix_get(back, 0, 2, &x) == LTREE_OK);
  CHECK(x == 3);
  ltree_matrix_free(back);
  ltree_matrix_free(m);

  CHECK(ltree_matrix_read_csv("/nonexistent/x.csv", &back) == LTREE_ERR_IO);
  CHECK(ltree_matrix_create(0, 2, buf, &back) == LTREE_ERR_INVALID_ARGUMENT);
  CHECK(ltree_matrix_create(1, 1, nullptr, &back) == LTREE_ERR_INVALID_ARGUMENT);
  ltree_matrix_free(nullptr);
}

TEST_CASE("c api: measures and chow-liu") {
  ltree_matrix* s = make(3, 3, {1, 0.9, 0.5, 0.9, 1, 0.8, 0.5, 0.8, 1});
  ltree_matrix* id = make(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  double v = 0;
  CHECK(ltree_mutual_information(s, 0, 1, &v) == LTREE_OK);
  CHECK(v == doctest::Approx(-0.5 * std::log(1 - 0.81)).epsilon(1e-14));
  CHECK(ltree_kl_gaussian(s, s, &v) == LTREE_OK);
  CHECK(v == 0.0);
  CHECK(ltree_kl_gaussian(id, s, &v) == LTREE_OK);
  CHECK(v > 0.0);

  ltree_tree_result* t = nullptr;
  REQUIRE(ltree_chow_liu(s, &t) == LTREE_OK);
  CHECK(ltree_tree_num_vertices(t) == 3);
  REQUIRE(ltree_tree_num_edges(t) == 2);
  std::size_t u = 0, w = 0;
  CHECK(ltree_tree_edge(t, 0, &u, &w) == LTREE_OK);
  CHECK((u == 0 && w == 1));
  CHECK(ltree_tree_edge(t, 1, &u, &w) == LTREE_OK);
  CHECK((u == 1 && w == 2));
  CHECK(ltree_tree_edge(t, 2, &u, &w) == LTREE_ERR_INVALID_ARGUMENT);
  CHECK(ltree_tree_kl(t) == doctest::Approx(0.6148202755372588).epsilon(1e-12));
  ltree_matrix* tc = nullptr;
  CHECK(ltree_tree_covariance(t, &tc) == LTREE_OK);
  CHECK(ltree_matrix_get(tc, 0, 2, &v) == LTREE_OK);
  CHECK(v == doctest::Approx(0.72));
  ltree_matrix_free(tc);

  ltree_tree_result* b = nullptr;
  REQUIRE(ltree_brute_force_tree(s, &b) == LTREE_OK);
  CHECK(ltree_tree_kl(b) == doctest::Approx(ltree_tree_kl(t)));
  ltree_tree_result_free(b);
  ltree_tree_result_free(t);

  ltree_matrix* bad = make(3, 3, {1, 0.9, 0.1, 0.9, 1, 0.8, 0.1, 0.8, 1});
  CHECK(ltree_chow_liu(bad, &t) == LTREE_ERR_NOT_POSITIVE_DEFINITE);
  ltree_matrix* rect = make(1, 2, {1, 2});
  CHECK(ltree_chow_liu(rect, &t) != LTREE_OK);
  CHECK(ltree_chow_liu(nullptr, &t) == LTREE_ERR_INVALID_ARGUMENT);
  ltree_matrix_free(rect);
  ltree_matrix_free(bad);
  ltree_matrix_free(id);
  ltree_matrix_free(s);
}

TEST_CASE("c api: simulate and run em") {
  ltree_matrix *sigma = nullptr, *sigma0 = nullptr, *h = nullptr, *d = nullptr,
               *y = nullptr;
  REQUIRE(ltree_generate_ground_truth(6, 3, &sigma) == LTREE_OK);
  REQUIRE(ltree_generate_prior(sigma, 0.5, 4, &sigma0) == LTREE_OK);
  REQUIRE(ltree_generate_mixing(sigma, 4, 20.0, 5, &h, &d) == LTREE_OK);
  CHECK(ltree_matrix_rows(h) == 4);
  CHECK(ltree_matrix_cols(h) == 6);
  REQUIRE(ltree_sample_observations(h, d, sigma, 200, 6, &y) == LTREE_OK);
  CHECK(ltree_matrix_rows(y) == 200);
  CHECK(ltree_matrix_cols(y) == 4);

  ltree_em_trace* trace = nullptr;
  REQUIRE(ltree_run_em(sigma0, h, d, y, sigma, 0.01, 20, &trace) == LTREE_OK);
  const std::size_t n = ltree_em_num_iterations(trace);
  CHECK(n >= 1);
  CHECK(n <= 20);
  ltree_em_record rec;
  CHECK(ltree_em_iteration(trace, 0, &rec) == LTREE_OK);
  CHECK(rec.index == 1);
  CHECK(std::isnan(rec.step_kl));
  CHECK(!std::isnan(rec.latent_kl));
  CHECK(ltree_em_iteration(trace, n - 1, &rec) == LTREE_OK);
  if (ltree_em_stop_reason(trace) == LTREE_STOP_EPSILON) CHECK(rec.step_kl < 0.01);
  CHECK(ltree_em_iteration(trace, n, &rec) == LTREE_ERR_INVALID_ARGUMENT);
  CHECK(ltree_em_monotonicity_violations(trace) == 0);

  std::size_t edges[10];
  CHECK(ltree_em_iteration_edges(trace, 0, edges, 9) == LTREE_ERR_INVALID_ARGUMENT);
  CHECK(ltree_em_iteration_edges(trace, 0, edges, 10) == LTREE_OK);
  for (std::size_t e : edges) CHECK(e < 6);
  ltree_matrix* cov = nullptr;
  CHECK(ltree_em_iteration_covariance(trace, n - 1, &cov) == LTREE_OK);
  CHECK(ltree_matrix_rows(cov) == 6);
  ltree_matrix_free(cov);
  ltree_em_trace_free(trace);

  // Without ground truth latent_kl is NaN.
  REQUIRE(ltree_run_em(sigma0, h, d, y, nullptr, 0.01, 5, &trace) == LTREE_OK);
  CHECK(ltree_em_iteration(trace, 0, &rec) == LTREE_OK);
  CHECK(std::isnan(rec.latent_kl));
  ltree_em_trace_free(trace);

  CHECK(ltree_run_em(sigma0, h, d, y, nullptr, 0.0, 5, &trace) ==
        LTREE_ERR_INVALID_ARGUMENT);
  CHECK(ltree_run_em(sigma0, d, d, y, nullptr, 0.01, 5, &trace) == LTREE_ERR_DIMENSION);

  for (auto* m : {sigma, sigma0, h, d, y}) ltree_matrix_free(m);
}

TEST_CASE("c api: sweep") {
  ltree_sweep_config* cfg = nullptr;
  REQUIRE(ltree_sweep_config_create(&cfg) == LTREE_OK);
  CHECK(ltree_sweep_config_key_count() > 10);
  CHECK(ltree_sweep_config_key(ltree_sweep_config_key_count()) == nullptr);
  CHECK(ltree_sweep_config_set(cfg, "p", "5") == LTREE_OK);
  CHECK(ltree_sweep_config_set(cfg, "m_values", "2,3") == LTREE_OK);
  CHECK(ltree_sweep_config_set(cfg, "trials", "3") == LTREE_OK);
  CHECK(ltree_sweep_config_set(cfg, "r", "50") == LTREE_OK);
  CHECK(ltree_sweep_config_set(cfg, "nope", "1") == LTREE_ERR_CONFIG);
  CHECK(ltree_sweep_config_set(cfg, "p", "x") == LTREE_ERR_CONFIG);
  char buf[32];
  CHECK(ltree_sweep_config_get(cfg, "m_values", buf, sizeof buf) == LTREE_OK);
  CHECK(std::string(buf) == "2,3");
  CHECK(ltree_sweep_config_get(cfg, "m_values", buf, 3) == LTREE_ERR_INVALID_ARGUMENT);
  CHECK(ltree_sweep_config_load(cfg, "/nonexistent.cfg") == LTREE_ERR_IO);

  ltree_sweep_result* res = nullptr;
  REQUIRE(ltree_run_sweep(cfg, &res) == LTREE_OK);
  CHECK(ltree_sweep_result_num_trials(res) == 6);
  CHECK(ltree_sweep_result_num_failures(res) == 0);
  REQUIRE(ltree_sweep_result_num_summaries(res) == 2);
  ltree_sweep_summary s;
  CHECK(ltree_sweep_result_summary(res, 1, &s) == LTREE_OK);
  CHECK(s.m == 3);
  CHECK(s.completed == 3);
  CHECK(s.kl_oracle_mean <= s.kl_em_mean + 1e-12);
  CHECK(ltree_sweep_result_summary(res, 2, &s) == LTREE_ERR_INVALID_ARGUMENT);

  const auto stem = (std::filesystem::temp_directory_path() / "ltree_capi_sweep").string();
  CHECK(ltree_sweep_result_write(res, stem.c_str()) == LTREE_OK);
  CHECK(std::filesystem::exists(stem + ".csv"));
  CHECK(ltree_sweep_result_write(res, "/nonexistent-dir/x") == LTREE_ERR_IO);
  ltree_sweep_result_free(res);

  CHECK(ltree_sweep_config_set(cfg, "m_values", "9") == LTREE_OK);
  CHECK(ltree_run_sweep(cfg, &res) == LTREE_ERR_CONFIG);
  ltree_sweep_config_free(cfg);
}
