#pragma once

#include "ltree/em_mst.hpp"
#include "ltree/gaussian.hpp"
#include "ltree/linear_model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ltree {

/// Synthetic sweep over observation dimensions m with random mixings.
/// Field names double as config-file keys and CLI flags.
struct ExperimentConfig {
  std::size_t p = 10;
  std::vector<std::size_t> m_values = {5, 6, 7, 8, 9};
  std::size_t r = 100;
  double snr_db = 20.0;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double epsilon = 0.01;
  std::size_t l_max = 20;
  /// Weight of the random component in the prior Σ₀ = (1−α)Σ + αP.
  double alpha = 0.5;
  /// 0 gives an exactly tree-structured ground truth; β > 0 blends in a
  /// random correlation matrix: Σ = (1−β)Σ_tree + βP.
  double non_tree_mix = 0.0;
  /// Use H = I instead of a random mixing (requires m = p).
  bool identity_mixing = false;
  /// Optional CSV inputs replacing the generated Σ and Σ₀.
  std::string sigma_csv;
  std::string sigma0_csv;
  /// Output stem: writes <output>.json and <output>.csv when non-empty.
  std::string output;
  /// Worker threads for trials; 0 picks the hardware concurrency.
  std::size_t threads = 0;

  /// Throws ErrorCode::Config on an unknown key or malformed value.
  void set(const std::string& key, const std::string& value);
  /// Throws ErrorCode::Config when the combination is invalid.
  void validate() const;
  /// Key/value echo in a fixed order, formatted so set() reads it back.
  std::vector<std::pair<std::string, std::string>> entries() const;

  static const std::vector<std::string>& keys();
};

/// Reads `key = value` lines; `#` starts a comment. Keys are applied on top
/// of `base` in file order.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {},
                              const std::string& source = "<stream>");
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Unit-variance tree covariance on a uniformly random labeled tree, edge
/// correlations uniform in [0.5, 0.95] with a random sign.
CovMatrix generate_ground_truth(std::size_t p, std::uint64_t seed);

/// Random SPD matrix rescaled to the given diagonal.
CovMatrix random_spd_with_diagonal(const Vector& diag, std::uint64_t seed);

/// (1−β)Σ + βP with P random SPD sharing Σ's diagonal.
CovMatrix blend_with_random(const CovMatrix& sigma, double beta,
                            std::uint64_t seed);

/// Σ₀ = (1−α)Σ + αP.
CovMatrix generate_prior(const CovMatrix& sigma, double alpha, std::uint64_t seed);

/// H with iid N(0, 1) entries (redrawn up to 10 times on rank deficiency),
/// D = σ²I with σ² = tr(HΣHᵀ) / (m · 10^(snr_db/10)).
LinearModel generate_mixing(std::size_t p, std::size_t m, double snr_db,
                            const CovMatrix& sigma, std::uint64_t seed);

/// White noise at the given SNR for a fixed H.
LinearModel with_white_noise(Matrix h, double snr_db, const CovMatrix& sigma);

std::uint64_t trial_seed(std::uint64_t seed, std::size_t m, std::size_t trial);

struct TrialRecord {
  std::size_t m;
  std::size_t trial;
  double kl_em;
  double kl_prior;
  double kl_oracle;
  std::size_t iterations;
  StopReason stop_reason;
  std::size_t monotonicity_violations;
  double obs_kl_first;
  double obs_kl_final;
};

struct TrialFailure {
  std::size_t m;
  std::size_t trial;
  std::string message;
};

struct ColumnStats {
  double mean = 0.0;
  double std_error = 0.0;
};

struct MSummary {
  std::size_t m;
  std::size_t completed;
  std::size_t failed;
  ColumnStats kl_em, kl_prior, kl_oracle, iterations;
};

struct SweepResult {
  ExperimentConfig config;
  CovMatrix sigma;
  CovMatrix sigma0;
  std::vector<TrialRecord> trials;  // ordered by (m, trial)
  std::vector<TrialFailure> failures;
  std::vector<MSummary> summaries;  // one per m, in config order
};

/// Runs every (m, trial) cell. Trial failures are recorded and excluded;
/// throws ErrorCode::Numerical only when no trial succeeds.
SweepResult run_sweep(const ExperimentConfig& config);

ColumnStats column_stats(const std::vector<double>& values);

}  // namespace ltree
