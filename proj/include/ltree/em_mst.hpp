#pragma once

#include "ltree/chow_liu.hpp"
#include "ltree/gaussian.hpp"
#include "ltree/linear_model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace ltree {

/// Posterior of X given Y = y under the prior N(0, Σ̃):
/// mean = gain · y, covariance = cov (identical for every y).
struct PosteriorGaussian {
  Matrix gain;  // p×m, C Hᵀ D⁻¹
  CovMatrix cov;  // C = (Σ̃⁻¹ + Hᵀ D⁻¹ H)⁻¹
};

/// When `tree` is given, Σ̃⁻¹ is assembled from the tree edge marginals
/// instead of a dense inversion.
PosteriorGaussian posterior(const CovMatrix& sigma_tree, const LinearModel& model,
                            const SpanningTree* tree = nullptr);

/// Posterior-averaged latent second moment
///   Ω = C + C Hᵀ D⁻¹ M D⁻¹ H C,   M = (1/R) Σ y yᵀ (uncentered).
CovMatrix compute_omega(const CovMatrix& sigma_tree, const LinearModel& model,
                        const ObservationSet& obs,
                        const SpanningTree* tree = nullptr);

/// One EM iteration: Chow-Liu fit of Ω(Σ̃).
TreeApproxResult em_step(const CovMatrix& sigma_tree, const LinearModel& model,
                         const ObservationSet& obs,
                         const SpanningTree* tree = nullptr);

struct EmConfig {
  CovMatrix sigma0;
  double epsilon = 0.01;
  std::size_t l_max = 20;
};

enum class StopReason { EpsilonReached, LmaxReached };

const char* to_string(StopReason reason);

struct EmIteration {
  std::size_t index;  // l, starting at 1
  CovMatrix sigma_tree;
  SpanningTree tree;
  double obs_kl;
  std::optional<double> latent_kl;
  /// KL(Σ̃^(l−1) ‖ Σ̃^l); absent on the first iterate.
  std::optional<double> step_kl;
};

struct EmTrace {
  std::vector<EmIteration> iterations;
  StopReason stop_reason = StopReason::LmaxReached;
  /// Iterations whose obs_kl rose by more than kMonotonicitySlack over the
  /// previous one. Nonzero means the EM ascent property was violated
  /// numerically.
  std::size_t monotonicity_violations = 0;

  const EmIteration& final() const { return iterations.back(); }
  /// 1-based index of the iterate with the smallest latent_kl, when ground
  /// truth was supplied. Used to calibrate l_max on training scenarios.
  std::optional<std::size_t> best_latent_index() const;
};

inline constexpr double kMonotonicitySlack = 1e-6;

/// EM MST approximation. Σ̃¹ = chow_liu(Σ₀); each further iterate is
/// em_step of the previous one. Stops when KL(Σ̃^l ‖ Σ̃^(l+1)) < ε or after
/// l_max iterates.
EmTrace run_em(const EmConfig& config, const LinearModel& model,
               const ObservationSet& obs,
               const std::optional<CovMatrix>& ground_truth = std::nullopt);

}  // namespace ltree
