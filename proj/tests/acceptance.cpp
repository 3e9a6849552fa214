// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include "support.hpp"

#include "ltree/chow_liu.hpp"
#include "ltree/em_mst.hpp"
#include "ltree/experiment.hpp"
#include "ltree/results.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace ltree;
using ltree::testing::random_spd;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// P(X ≥ k) for X ~ Binomial(n, ½).
double sign_test_p_value(std::size_t k, std::size_t n) {
  double p = 0.0;
  for (std::size_t i = k; i <= n; ++i) {
    p += std::exp(std::lgamma(double(n) + 1) - std::lgamma(double(i) + 1) -
                  std::lgamma(double(n - i) + 1) - double(n) * std::log(2.0));
  }
  return p;
}

ExperimentConfig a4_config() {
  ExperimentConfig c;
  c.p = 10;
  c.m_values = {5, 6, 7, 8, 9};
  c.r = 100;
  c.snr_db = 20.0;
  c.trials = 100;
  c.seed = 1;
  c.alpha = 0.5;
  c.epsilon = 0.01;
  c.l_max = 20;
  return c;
}

std::map<std::size_t, std::vector<const TrialRecord*>> by_m(const SweepResult& r) {
  std::map<std::size_t, std::vector<const TrialRecord*>> out;
  for (const auto& t : r.trials) out[t.m].push_back(&t);
  return out;
}

Outcome a1_chow_liu_optimality() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::size_t p = 3 + i % 4;
    const CovMatrix sigma = random_spd(p, 1000 + i);
    worst = std::max(worst, std::abs(chow_liu(sigma).kl -
                                     brute_force_optimal_tree(sigma).kl));
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "max |kl_chowliu - kl_bruteforce| = " << worst << " (tol 1e-9), " << secs
    << " s (limit 30 s)";
  return {worst < 1e-9 && secs < 30.0, d.str()};
}

Outcome a2_simplified_kl() {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const std::size_t p = 3 + i % 6;
    const CovMatrix sigma = random_spd(p, 2000 + i);
    const CovMatrix tree_cov = chow_liu(sigma).cov;
    worst = std::max(worst, std::abs(kl_tree_simplified(sigma, tree_cov) -
                                     kl_gaussian(sigma, tree_cov)));
  }
  std::ostringstream d;
  d << "max |kl_simplified - kl_gaussian| = " << worst << " (tol 1e-9)";
  return {worst < 1e-9, d.str()};
}

Outcome a3_omega_identity() {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(3000 + i);
    const std::size_t p = 2 + i % 5;
    const std::size_t m = 1 + rng.below(p);
    const std::size_t r = 1 + rng.below(100);
    const CovMatrix sigma_tree = chow_liu(random_spd(p, 3500 + i)).cov;
    const LinearModel model(testing::random_matrix(m, p, rng),
                            random_spd(m, 3700 + i));
    const ObservationSet obs(testing::random_matrix(r, m, rng));
    const Matrix pooled = compute_omega(sigma_tree, model, obs).matrix();
    const Matrix oracle = testing::samplewise_omega(
        sigma_tree.matrix(), model.h(), model.d().matrix(), obs.samples());
    worst = std::max(worst, (pooled - oracle).cwiseAbs().maxCoeff());
  }
  std::ostringstream d;
  d << "max entrywise |pooled - samplewise| = " << worst << " (tol 1e-8)";
  return {worst < 1e-8, d.str()};
}

Outcome a4_qualitative(const SweepResult& res, double secs) {
  bool ok = res.failures.empty() && secs < 300.0;
  std::ostringstream d;
  double prev = INFINITY;
  for (const auto& [m, trials] : by_m(res)) {
    double em = 0.0, prior = 0.0;
    std::size_t wins = 0;
    for (const auto* t : trials) {
      em += t->kl_em;
      prior += t->kl_prior;
      if (t->kl_em < t->kl_prior) ++wins;
    }
    em /= double(trials.size());
    prior /= double(trials.size());
    const double pv = sign_test_p_value(wins, trials.size());
    const bool row = em < prior && pv < 0.05 && em <= prev;
    ok = ok && row;
    d << "\n      m=" << m << " mean kl_em=" << em << " mean kl_prior=" << prior
      << " wins=" << wins << "/" << trials.size() << " sign-test p=" << pv
      << (row ? "" : "  <-- violation");
    prev = em;
  }
  d << "\n      failures=" << res.failures.size() << ", runtime " << secs
    << " s (target 300 s)";
  return {ok, d.str()};
}

Outcome a5_monotonicity(const SweepResult& res) {
  std::size_t violations = 0;
  for (const auto& t : res.trials) violations += t.monotonicity_violations;
  std::ostringstream d;
  d << violations << " obs_kl increases beyond 1e-6 across " << res.trials.size()
    << " trials (0 permitted)";
  return {violations == 0 && !res.trials.empty(), d.str()};
}

Outcome a6_tree_structure() {
  double worst_marg = 0.0, worst_prec = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::size_t p = 3 + i % 8;
    Rng rng(6000 + i);
    const CovMatrix sigma = random_spd(p, 6500 + i);
    const SpanningTree tree = testing::random_tree(p, rng);
    const CovMatrix t = tree_covariance(sigma, tree);
    const Matrix prec = t.matrix().inverse();
    for (std::size_t u = 0; u < p; ++u) {
      worst_marg = std::max(worst_marg, std::abs(t(u, u) - sigma(u, u)));
      for (std::size_t v = u + 1; v < p; ++v) {
        if (tree.has_edge(u, v)) {
          worst_marg = std::max(worst_marg, std::abs(t(u, v) - sigma(u, v)));
        } else {
          worst_prec = std::max(worst_prec, std::abs(prec(Eigen::Index(u), Eigen::Index(v))));
        }
      }
    }
  }
  std::ostringstream d;
  d << "max marginal mismatch = " << worst_marg
    << " (tol 1e-12), max non-edge precision = " << worst_prec << " (tol 1e-9)";
  return {worst_marg <= 1e-12 && worst_prec < 1e-9, d.str()};
}

Outcome a7_stopping(const SweepResult& fine, const SweepResult& coarse) {
  bool ok = true;
  std::ostringstream d;
  const auto f = by_m(fine), c = by_m(coarse);
  for (const auto& [m, ft] : f) {
    const auto& ct = c.at(m);
    double fi = 0, ci = 0, fk = 0, ck = 0;
    for (const auto* t : ft) fi += double(t->iterations), fk += t->kl_em;
    for (const auto* t : ct) ci += double(t->iterations), ck += t->kl_em;
    fi /= double(ft.size()), fk /= double(ft.size());
    ci /= double(ct.size()), ck /= double(ct.size());
    const bool iter_ok = ci <= fi;
    const bool kl_ok = ck >= fk - 1e-9;
    ok = ok && iter_ok && kl_ok;
    d << "\n      m=" << m << " iterations eps0.1=" << ci << " eps0.01=" << fi
      << (iter_ok ? "" : " <-- iterations") << " | mean kl_em eps0.1=" << ck
      << " eps0.01=" << fk << (kl_ok ? "" : "  <-- kl ordering violated");
  }
  return {ok, d.str()};
}

Outcome a8_determinism(const SweepResult& first) {
  const SweepResult again = run_sweep(a4_config());
  std::ostringstream a, b, ja, jb;
  write_results_csv(a, first);
  write_results_csv(b, again);
  write_results_json(ja, first);
  write_results_json(jb, again);
  const bool ok = a.str() == b.str() && ja.str() == jb.str();
  std::ostringstream d;
  d << "csv " << a.str().size() << " bytes, " << (a.str() == b.str() ? "identical" : "DIFFERENT")
    << "; json " << (ja.str() == jb.str() ? "identical" : "DIFFERENT");
  return {ok, d.str()};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](const char* id, const char* title, const Outcome& o) {
    std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", id, title,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };
  auto guarded = [&](const char* id, const char* title,
                     const std::function<Outcome()>& f) {
    try {
      report(id, title, f());
    } catch (const std::exception& e) {
      report(id, title, {false, std::string("exception: ") + e.what()});
    }
  };

  guarded("A1", "Chow-Liu optimality vs exhaustive search", a1_chow_liu_optimality);
  guarded("A2", "simplified tree KL equals full Gaussian KL", a2_simplified_kl);
  guarded("A3", "pooled Omega equals sample-wise posterior moments", a3_omega_identity);

  const auto t0 = Clock::now();
  const SweepResult fine = run_sweep(a4_config());
  const double secs = seconds_since(t0);
  ExperimentConfig coarse_cfg = a4_config();
  coarse_cfg.epsilon = 0.1;
  const SweepResult coarse = run_sweep(coarse_cfg);

  guarded("A4", "EM tree beats prior Chow-Liu tree, improves with m",
          [&] { return a4_qualitative(fine, secs); });
  guarded("A5", "EM observation KL is monotone", [&] { return a5_monotonicity(fine); });
  guarded("A6", "tree covariance marginals and precision sparsity", a6_tree_structure);
  guarded("A7", "coarser stopping threshold behaviour",
          [&] { return a7_stopping(fine, coarse); });
  guarded("A8", "sweep results are reproducible", [&] { return a8_determinism(fine); });

  std::printf("%d of 8 acceptance criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
