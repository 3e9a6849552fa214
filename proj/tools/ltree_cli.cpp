// Command-line front end. Talks to the library exclusively through ltree.h.

#include "ltree.h"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalError = 2, kIoError = 3 };

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using MatrixPtr = std::unique_ptr<ltree_matrix, Deleter<ltree_matrix, ltree_matrix_free>>;
using TreePtr =
    std::unique_ptr<ltree_tree_result, Deleter<ltree_tree_result, ltree_tree_result_free>>;
using TracePtr =
    std::unique_ptr<ltree_em_trace, Deleter<ltree_em_trace, ltree_em_trace_free>>;
using ConfigPtr = std::unique_ptr<ltree_sweep_config,
                                  Deleter<ltree_sweep_config, ltree_sweep_config_free>>;
using ResultPtr = std::unique_ptr<ltree_sweep_result,
                                  Deleter<ltree_sweep_result, ltree_sweep_result_free>>;

struct Failure {
  ltree_status status;
};

int exit_code(ltree_status s) {
  switch (s) {
    case LTREE_OK: return kOk;
    case LTREE_ERR_IO: return kIoError;
    case LTREE_ERR_NUMERICAL:
    case LTREE_ERR_INTERNAL: return kNumericalError;
    default: return kConfigError;
  }
}

void check(ltree_status s, const std::string& context) {
  if (s == LTREE_OK) return;
  std::cerr << "ltree: " << context << ": " << ltree_last_error() << " ("
            << ltree_status_string(s) << ")\n";
  throw Failure{s};
}

MatrixPtr read_matrix(const std::string& path) {
  ltree_matrix* m = nullptr;
  check(ltree_matrix_read_csv(path.c_str(), &m), "reading " + path);
  return MatrixPtr(m);
}

void write_matrix(const ltree_matrix* m, const std::string& path) {
  check(ltree_matrix_write_csv(m, path.c_str()), "writing " + path);
}

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---- chowliu ---------------------------------------------------------------

struct ChowLiuArgs {
  std::string input, cov_out, edges_out;
};

int run_chowliu(const ChowLiuArgs& a) {
  MatrixPtr sigma = read_matrix(a.input);
  ltree_tree_result* raw = nullptr;
  check(ltree_chow_liu(sigma.get(), &raw), "chow-liu");
  TreePtr tree(raw);

  std::vector<std::pair<size_t, size_t>> edges(ltree_tree_num_edges(tree.get()));
  for (size_t k = 0; k < edges.size(); ++k) {
    check(ltree_tree_edge(tree.get(), k, &edges[k].first, &edges[k].second), "edge");
  }
  std::cout << "kl " << fmt(ltree_tree_kl(tree.get())) << '\n';
  for (const auto& [u, v] : edges) std::cout << "edge " << u << ' ' << v << '\n';

  if (!a.edges_out.empty()) {
    std::ofstream out(a.edges_out);
    if (!out) {
      std::cerr << "ltree: cannot open '" << a.edges_out << "' for writing\n";
      return kIoError;
    }
    for (const auto& [u, v] : edges) out << u << ',' << v << '\n';
  }
  if (!a.cov_out.empty()) {
    ltree_matrix* c = nullptr;
    check(ltree_tree_covariance(tree.get(), &c), "tree covariance");
    write_matrix(MatrixPtr(c).get(), a.cov_out);
  }
  return kOk;
}

// ---- em --------------------------------------------------------------------

struct EmArgs {
  std::string sigma0, h, d, obs, truth, out, trace;
  double epsilon = 0.01;
  size_t l_max = 20;
};

int run_em(const EmArgs& a) {
  MatrixPtr sigma0 = read_matrix(a.sigma0);
  MatrixPtr h = read_matrix(a.h);
  MatrixPtr d = read_matrix(a.d);
  MatrixPtr obs = read_matrix(a.obs);
  MatrixPtr truth;
  if (!a.truth.empty()) truth = read_matrix(a.truth);

  ltree_em_trace* raw = nullptr;
  check(ltree_run_em(sigma0.get(), h.get(), d.get(), obs.get(), truth.get(),
                     a.epsilon, a.l_max, &raw),
        "em");
  TracePtr trace(raw);
  const size_t n = ltree_em_num_iterations(trace.get());
  const size_t p = ltree_matrix_rows(sigma0.get());

  ltree_matrix* final_cov = nullptr;
  check(ltree_em_iteration_covariance(trace.get(), n - 1, &final_cov), "final iterate");
  write_matrix(MatrixPtr(final_cov).get(), a.out);

  std::ofstream trace_file;
  if (!a.trace.empty()) {
    trace_file.open(a.trace);
    if (!trace_file) {
      std::cerr << "ltree: cannot open '" << a.trace << "' for writing\n";
      return kIoError;
    }
    trace_file << "iteration,obs_kl,latent_kl,step_kl,edges\n";
  }
  std::vector<size_t> edges(2 * (p - 1));
  for (size_t k = 0; k < n; ++k) {
    ltree_em_record rec{};
    check(ltree_em_iteration(trace.get(), k, &rec), "trace");
    check(ltree_em_iteration_edges(trace.get(), k, edges.data(), edges.size()), "trace");
    std::string edge_text;
    for (size_t e = 0; e + 1 < edges.size(); e += 2) {
      if (e) edge_text += ' ';
      edge_text += std::to_string(edges[e]) + '-' + std::to_string(edges[e + 1]);
    }
    if (trace_file.is_open()) {
      trace_file << rec.index << ',' << fmt(rec.obs_kl) << ',' << fmt(rec.latent_kl)
                 << ',' << fmt(rec.step_kl) << ',' << edge_text << '\n';
    }
  }
  const bool by_epsilon = ltree_em_stop_reason(trace.get()) == LTREE_STOP_EPSILON;
  std::cout << "iterations " << n << '\n'
            << "stop_reason " << (by_epsilon ? "epsilon" : "lmax") << '\n';
  ltree_em_record last{};
  check(ltree_em_iteration(trace.get(), n - 1, &last), "trace");
  std::cout << "obs_kl " << fmt(last.obs_kl) << '\n';
  if (truth) std::cout << "latent_kl " << fmt(last.latent_kl) << '\n';
  if (const size_t v = ltree_em_monotonicity_violations(trace.get())) {
    std::cerr << "ltree: warning: observation KL increased in " << v
              << " iteration(s); EM ascent violated numerically\n";
  }
  return kOk;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
  size_t p = 10, m = 5, r = 100;
  double snr_db = 20.0, alpha = 0.5;
  uint64_t seed = 1;
  std::string dir = ".";
};

int run_simulate(const SimulateArgs& a) {
  ltree_matrix* raw = nullptr;
  check(ltree_generate_ground_truth(a.p, a.seed, &raw), "ground truth");
  MatrixPtr sigma(raw);
  check(ltree_generate_prior(sigma.get(), a.alpha, a.seed + 1, &raw), "prior");
  MatrixPtr sigma0(raw);
  ltree_matrix* hr = nullptr;
  ltree_matrix* dr = nullptr;
  check(ltree_generate_mixing(sigma.get(), a.m, a.snr_db, a.seed + 2, &hr, &dr), "mixing");
  MatrixPtr h(hr), d(dr);
  check(ltree_sample_observations(h.get(), d.get(), sigma.get(), a.r, a.seed + 3, &raw),
        "sampling");
  MatrixPtr y(raw);

  const std::string base = a.dir.empty() ? "." : a.dir;
  std::error_code ec;
  std::filesystem::create_directories(base, ec);
  if (ec) {
    std::cerr << "ltree: cannot create '" << base << "': " << ec.message() << '\n';
    return kIoError;
  }
  write_matrix(sigma.get(), base + "/sigma.csv");
  write_matrix(sigma0.get(), base + "/sigma0.csv");
  write_matrix(h.get(), base + "/h.csv");
  write_matrix(d.get(), base + "/d.csv");
  write_matrix(y.get(), base + "/y.csv");
  return kOk;
}

// ---- sweep -----------------------------------------------------------------

int run_sweep(const std::string& config_path,
              const std::map<std::string, std::string>& overrides) {
  ltree_sweep_config* raw = nullptr;
  check(ltree_sweep_config_create(&raw), "config");
  ConfigPtr cfg(raw);
  if (!config_path.empty()) {
    check(ltree_sweep_config_load(cfg.get(), config_path.c_str()), "config");
  }
  for (const auto& [k, v] : overrides) {
    check(ltree_sweep_config_set(cfg.get(), k.c_str(), v.c_str()), "--" + k);
  }

  ltree_sweep_result* res_raw = nullptr;
  check(ltree_run_sweep(cfg.get(), &res_raw), "sweep");
  ResultPtr res(res_raw);

  std::printf("%4s %9s %12s %12s %12s %10s\n", "m", "trials", "kl_em", "kl_prior",
              "kl_oracle", "iterations");
  for (size_t i = 0; i < ltree_sweep_result_num_summaries(res.get()); ++i) {
    ltree_sweep_summary s{};
    check(ltree_sweep_result_summary(res.get(), i, &s), "summary");
    std::printf("%4zu %9zu %12.6f %12.6f %12.6f %10.3f\n", s.m, s.completed,
                s.kl_em_mean, s.kl_prior_mean, s.kl_oracle_mean, s.iterations_mean);
  }
  if (const size_t f = ltree_sweep_result_num_failures(res.get())) {
    std::cerr << "ltree: " << f << " trial(s) failed and were excluded\n";
  }

  char output[4096];
  check(ltree_sweep_config_get(cfg.get(), "output", output, sizeof output), "config");
  if (output[0] != '\0') {
    check(ltree_sweep_result_write(res.get(), output), "writing results");
    std::cout << "wrote " << output << ".json and " << output << ".csv\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent tree covariance learning via EM and Chow-Liu trees"};
  app.set_version_flag("--version", std::string(ltree_version()));
  app.require_subcommand(1);

  ChowLiuArgs cl;
  auto* chowliu = app.add_subcommand("chowliu", "Chow-Liu tree of a covariance CSV");
  chowliu->add_option("-i,--input", cl.input, "covariance CSV")->required();
  chowliu->add_option("--cov", cl.cov_out, "write the tree covariance CSV here");
  chowliu->add_option("--edges", cl.edges_out, "write the edge list CSV here");

  EmArgs em;
  auto* emcmd = app.add_subcommand("em", "EM tree approximation from observations");
  emcmd->add_option("--sigma0", em.sigma0, "initial covariance CSV")->required();
  emcmd->add_option("--mixing", em.h, "mixing matrix CSV (m x p)")->required();
  emcmd->add_option("--noise", em.d, "noise covariance CSV (m x m)")->required();
  emcmd->add_option("--obs", em.obs, "observations CSV, one sample per row")->required();
  emcmd->add_option("--truth", em.truth, "ground-truth covariance CSV (diagnostics)");
  emcmd->add_option("--epsilon", em.epsilon, "stopping threshold in nats")
      ->capture_default_str();
  emcmd->add_option("--l_max", em.l_max, "iteration cap")->capture_default_str();
  emcmd->add_option("-o,--out", em.out, "output tree covariance CSV")->required();
  emcmd->add_option("--trace", em.trace, "per-iteration trace CSV");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Write a synthetic sigma/sigma0/h/d/y CSV set for the em command");
  simulate->add_option("--p", sim.p)->capture_default_str();
  simulate->add_option("--m", sim.m)->capture_default_str();
  simulate->add_option("--r", sim.r)->capture_default_str();
  simulate->add_option("--snr_db", sim.snr_db)->capture_default_str();
  simulate->add_option("--alpha", sim.alpha)->capture_default_str();
  simulate->add_option("--seed", sim.seed)->capture_default_str();
  simulate->add_option("--dir", sim.dir, "output directory")->capture_default_str();

  std::string config_path;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> override_values(ltree_sweep_config_key_count());
  auto* sweep = app.add_subcommand("sweep", "Run the synthetic comparison experiment");
  sweep->add_option("-c,--config", config_path, "key = value config file");
  for (size_t i = 0; i < override_values.size(); ++i) {
    const std::string key = ltree_sweep_config_key(i);
    sweep->add_option("--" + key, override_values[i], "override config key " + key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*chowliu) return run_chowliu(cl);
    if (*emcmd) return run_em(em);
    if (*simulate) return run_simulate(sim);
    for (size_t i = 0; i < override_values.size(); ++i) {
      const std::string key = ltree_sweep_config_key(i);
      if (sweep->count("--" + key)) overrides[key] = override_values[i];
    }
    return run_sweep(config_path, overrides);
  } catch (const Failure& f) {
    return exit_code(f.status);
  }
}
