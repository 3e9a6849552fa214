#include "ltree/experiment.hpp"

#include "ltree/chow_liu.hpp"
#include "ltree/csv.hpp"
#include "ltree/error.hpp"
#include "ltree/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace ltree {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Stream tags keep the generated Σ, Σ₀ and per-trial draws independent.
constexpr std::uint64_t kGroundTruthTag = 0x6c74726565475400ULL;
constexpr std::uint64_t kPerturbTag = 0x6c74726565505400ULL;
constexpr std::uint64_t kPriorTag = 0x6c74726565505200ULL;
constexpr std::uint64_t kObservationTag = 0x6c7472656559ULL;

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw Error(ErrorCode::Config,
              "config key '" + key + "': expected " + expected + ", got '" +
                  value + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_unsigned(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
    bad_value(key, raw, "a non-negative integer");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(out)) {
    bad_value(key, raw, "a finite real number");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, raw, "true or false");
}

std::string join(const std::vector<std::size_t>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = {
      "p",          "m_values",     "r",
      "snr_db",     "trials",       "seed",
      "epsilon",    "l_max",        "alpha",
      "non_tree_mix", "identity_mixing", "sigma_csv",
      "sigma0_csv", "output",       "threads"};
  return k;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "p") {
    p = parse_unsigned<std::size_t>(key, value);
  } else if (key == "m_values") {
    std::vector<std::size_t> ms;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (trim(item).empty()) continue;
      ms.push_back(parse_unsigned<std::size_t>(key, item));
    }
    m_values = std::move(ms);
  } else if (key == "r") {
    r = parse_unsigned<std::size_t>(key, value);
  } else if (key == "snr_db") {
    snr_db = parse_real(key, value);
  } else if (key == "trials") {
    trials = parse_unsigned<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "epsilon") {
    epsilon = parse_real(key, value);
  } else if (key == "l_max") {
    l_max = parse_unsigned<std::size_t>(key, value);
  } else if (key == "alpha") {
    alpha = parse_real(key, value);
  } else if (key == "non_tree_mix") {
    non_tree_mix = parse_real(key, value);
  } else if (key == "identity_mixing") {
    identity_mixing = parse_bool(key, value);
  } else if (key == "sigma_csv") {
    sigma_csv = trim(value);
  } else if (key == "sigma0_csv") {
    sigma0_csv = trim(value);
  } else if (key == "output") {
    output = trim(value);
  } else if (key == "threads") {
    threads = parse_unsigned<std::size_t>(key, value);
  } else {
    throw Error(ErrorCode::Config, "unknown config key '" + key + "'");
  }
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::Config, msg); };
  if (p < 2) fail("p must be >= 2");
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    const std::size_t m = m_values[i];
    if (std::find(m_values.begin(), m_values.begin() + static_cast<std::ptrdiff_t>(i), m) !=
        m_values.begin() + static_cast<std::ptrdiff_t>(i)) {
      fail("m_values contains " + std::to_string(m) + " more than once");
    }
    if (m < 1 || m > p) {
      fail("every m in m_values must satisfy 1 <= m <= p (got m = " +
           std::to_string(m) + ", p = " + std::to_string(p) + ")");
    }
    if (identity_mixing && m != p) fail("identity_mixing requires m = p");
  }
  if (r < 1) fail("r must be >= 1");
  if (trials < 1) fail("trials must be >= 1");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (l_max < 1) fail("l_max must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (!(non_tree_mix >= 0.0 && non_tree_mix <= 1.0)) {
    fail("non_tree_mix must lie in [0, 1]");
  }
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  return {{"p", std::to_string(p)},
          {"m_values", join(m_values)},
          {"r", std::to_string(r)},
          {"snr_db", format_double(snr_db)},
          {"trials", std::to_string(trials)},
          {"seed", std::to_string(seed)},
          {"epsilon", format_double(epsilon)},
          {"l_max", std::to_string(l_max)},
          {"alpha", format_double(alpha)},
          {"non_tree_mix", format_double(non_tree_mix)},
          {"identity_mixing", identity_mixing ? "true" : "false"},
          {"sigma_csv", sigma_csv},
          {"sigma0_csv", sigma0_csv},
          {"output", output},
          {"threads", std::to_string(threads)}};
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base,
                              const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Config, source + ":" + std::to_string(lineno) +
                                         ": expected 'key = value'");
    }
    try {
      base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::Config,
                  source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path + "'");
  return parse_config(in, std::move(base), path);
}

CovMatrix generate_ground_truth(std::size_t p, std::uint64_t seed) {
  if (p < 2) {
    throw Error(ErrorCode::InvalidArgument, "generate_ground_truth: p must be >= 2");
  }
  Rng rng(seed);
  std::vector<std::size_t> sequence(p - 2);
  for (auto& s : sequence) s = rng.below(p);
  const SpanningTree tree = decode_pruefer(p, sequence);
  std::vector<double> rho(tree.edges().size());
  for (auto& r : rho) {
    const double magnitude = rng.uniform(0.5, 0.95);
    r = rng.uniform() < 0.5 ? -magnitude : magnitude;
  }
  return tree_covariance(Vector::Ones(idx(p)), tree, rho);
}

CovMatrix random_spd_with_diagonal(const Vector& diag, std::uint64_t seed) {
  const Eigen::Index p = diag.size();
  Rng rng(seed);
  Matrix a(p, 2 * p);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  }
  const Matrix raw = a * a.transpose();
  const Vector scale = (diag.array() / raw.diagonal().array()).sqrt();
  Matrix out = scale.asDiagonal() * raw * scale.asDiagonal();
  out = 0.5 * (out + out.transpose());
  out.diagonal() = diag;
  return CovMatrix(std::move(out));
}

CovMatrix blend_with_random(const CovMatrix& sigma, double beta,
                            std::uint64_t seed) {
  if (!(beta >= 0.0 && beta <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "blend weight must lie in [0, 1]");
  }
  if (beta == 0.0) return sigma;
  const Vector diag = sigma.matrix().diagonal();
  const CovMatrix noise = random_spd_with_diagonal(diag, seed);
  Matrix out = (1.0 - beta) * sigma.matrix() + beta * noise.matrix();
  out.diagonal() = diag;
  return CovMatrix(std::move(out));
}

CovMatrix generate_prior(const CovMatrix& sigma, double alpha, std::uint64_t seed) {
  return blend_with_random(sigma, alpha, seed);
}

LinearModel with_white_noise(Matrix h, double snr_db, const CovMatrix& sigma) {
  const auto m = h.rows();
  const double signal = (h * sigma.matrix() * h.transpose()).trace();
  const double variance =
      signal / (static_cast<double>(m) * std::pow(10.0, snr_db / 10.0));
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw Error(ErrorCode::Numerical, "white noise variance is not positive");
  }
  return LinearModel(std::move(h),
                     CovMatrix(variance * Matrix::Identity(m, m)));
}

LinearModel generate_mixing(std::size_t p, std::size_t m, double snr_db,
                            const CovMatrix& sigma, std::uint64_t seed) {
  if (m < 1 || m > p) {
    throw Error(ErrorCode::InvalidArgument, "generate_mixing: need 1 <= m <= p");
  }
  if (sigma.dim() != p) {
    throw Error(ErrorCode::DimensionMismatch,
                "generate_mixing: covariance dimension differs from p");
  }
  Rng rng(seed);
  for (int attempt = 0; attempt <= 10; ++attempt) {
    Matrix h(idx(m), idx(p));
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      for (Eigen::Index j = 0; j < h.cols(); ++j) h(i, j) = rng.normal();
    }
    LinearModel model = with_white_noise(std::move(h), snr_db, sigma);
    if (model.has_full_row_rank()) return model;
  }
  throw Error(ErrorCode::RankDeficient,
              "generate_mixing: random H stayed rank deficient after 10 redraws");
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t m, std::size_t trial) {
  return mix_seed(seed ^ mix_seed((static_cast<std::uint64_t>(m) << 32) ^
                                  static_cast<std::uint64_t>(trial)));
}

ColumnStats column_stats(const std::vector<double>& values) {
  ColumnStats s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return s;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();

  CovMatrix sigma = config.sigma_csv.empty()
                        ? blend_with_random(
                              generate_ground_truth(config.p,
                                                    mix_seed(config.seed ^ kGroundTruthTag)),
                              config.non_tree_mix,
                              mix_seed(config.seed ^ kPerturbTag))
                        : CovMatrix(read_matrix_csv(config.sigma_csv));
  CovMatrix sigma0 =
      config.sigma0_csv.empty()
          ? generate_prior(sigma, config.alpha, mix_seed(config.seed ^ kPriorTag))
          : CovMatrix(read_matrix_csv(config.sigma0_csv));
  if (sigma.dim() != config.p || sigma0.dim() != config.p) {
    throw Error(ErrorCode::Config,
                "input covariance dimensions do not match p = " +
                    std::to_string(config.p));
  }

  const double kl_oracle = chow_liu(sigma).kl;
  const double kl_prior = kl_gaussian(sigma, chow_liu(sigma0).cov);
  const EmConfig em_config{sigma0, config.epsilon, config.l_max};

  struct Cell {
    std::optional<TrialRecord> record;
    std::string error;
  };
  const std::size_t n_cells = config.m_values.size() * config.trials;
  std::vector<Cell> cells(n_cells);

  auto run_cell = [&](std::size_t k) {
    const std::size_t m = config.m_values[k / config.trials];
    const std::size_t t = k % config.trials;
    const std::uint64_t s = trial_seed(config.seed, m, t);
    try {
      LinearModel model =
          config.identity_mixing
              ? with_white_noise(Matrix::Identity(idx(m), idx(config.p)),
                                 config.snr_db, sigma)
              : generate_mixing(config.p, m, config.snr_db, sigma, s);
      const ObservationSet obs =
          sample_observations(model, sigma, config.r, mix_seed(s ^ kObservationTag));
      const EmTrace trace = run_em(em_config, model, obs);
      cells[k].record = TrialRecord{
          m,
          t,
          kl_gaussian(sigma, trace.final().sigma_tree),
          kl_prior,
          kl_oracle,
          trace.iterations.size(),
          trace.stop_reason,
          trace.monotonicity_violations,
          trace.iterations.front().obs_kl,
          trace.final().obs_kl};
    } catch (const std::exception& e) {
      cells[k].error = e.what();
    }
  };

  std::size_t workers = config.threads ? config.threads
                                       : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n_cells, 1));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n_cells; ++k) run_cell(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n_cells; k = next++) run_cell(k);
      });
    }
  }

  SweepResult result{config, std::move(sigma), std::move(sigma0), {}, {}, {}};
  for (std::size_t k = 0; k < n_cells; ++k) {
    if (cells[k].record) {
      result.trials.push_back(*cells[k].record);
    } else {
      result.failures.push_back({config.m_values[k / config.trials],
                                 k % config.trials, cells[k].error});
    }
  }
  if (n_cells > 0 && result.trials.empty()) {
    throw Error(ErrorCode::Numerical,
                "all " + std::to_string(n_cells) +
                    " trials failed; first error: " + result.failures.front().message);
  }

  for (std::size_t i = 0; i < config.m_values.size(); ++i) {
    const std::size_t m = config.m_values[i];
    std::vector<double> em, prior, oracle, iters;
    for (const auto& t : result.trials) {
      if (t.m != m) continue;
      em.push_back(t.kl_em);
      prior.push_back(t.kl_prior);
      oracle.push_back(t.kl_oracle);
      iters.push_back(static_cast<double>(t.iterations));
    }
    result.summaries.push_back({m, em.size(), config.trials - em.size(),
                                column_stats(em), column_stats(prior),
                                column_stats(oracle), column_stats(iters)});
  }
  return result;
}

}  // namespace ltree
