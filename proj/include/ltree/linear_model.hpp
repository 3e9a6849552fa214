#pragma once

#include "ltree/gaussian.hpp"

#include <cstddef>
#include <cstdint>

namespace ltree {

/// Observation model Y = H X + W with W ~ N(0, D).
///
/// Construction checks shapes only (1 ≤ m ≤ p, D is m×m). The full-row-rank
/// requirement is exposed separately through has_full_row_rank() and
/// enforced by the EM driver, so degenerate mixings such as H = 0 can still
/// be fed to the closed-form helpers.
class LinearModel {
 public:
  LinearModel(Matrix h, CovMatrix d);

  std::size_t m() const { return static_cast<std::size_t>(h_.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(h_.cols()); }
  const Matrix& h() const { return h_; }
  const CovMatrix& d() const { return d_; }

  /// Smallest singular value of H exceeds 1e-10 times the largest.
  bool has_full_row_rank() const;
  void require_full_row_rank() const;

 private:
  Matrix h_;
  CovMatrix d_;
};

/// R observations of length m (one per row) with their sufficient statistics.
class ObservationSet {
 public:
  explicit ObservationSet(Matrix samples);

  std::size_t r() const { return static_cast<std::size_t>(samples_.rows()); }
  std::size_t m() const { return static_cast<std::size_t>(samples_.cols()); }
  const Matrix& samples() const { return samples_; }
  const Vector& mean() const { return mean_; }
  /// (1/R) Σ y yᵀ
  const Matrix& second_moment() const { return second_moment_; }
  /// (1/R) Σ (y − ȳ)(y − ȳ)ᵀ
  const Matrix& centered_cov() const { return centered_cov_; }

  bool operator==(const ObservationSet& other) const {
    return samples_.rows() == other.samples_.rows() &&
           samples_.cols() == other.samples_.cols() &&
           samples_ == other.samples_;
  }

 private:
  Matrix samples_;
  Vector mean_;
  Matrix second_moment_;
  Matrix centered_cov_;
};

/// Draws y = H x + w with x ~ N(0, Σ) and w ~ N(0, D). For each sample the
/// generator first yields the p latent normals, then the m noise normals.
ObservationSet sample_observations(const LinearModel& model,
                                   const CovMatrix& sigma_true, std::size_t r,
                                   std::uint64_t seed);

/// H Σ Hᵀ + D
CovMatrix observation_cov(const LinearModel& model, const CovMatrix& sigma);

/// N(0, S_Y) from the centered sample covariance. Throws RankDeficient when
/// S_Y is singular, reporting the deficit.
GaussianModel empirical_gaussian(const ObservationSet& obs);

/// KL(N(0, S_Y) ‖ N(0, H Σ̃ Hᵀ + D)), the observation-space fit objective.
double observation_kl(const ObservationSet& obs, const LinearModel& model,
                      const CovMatrix& sigma_tree);
double observation_kl(const GaussianModel& empirical, const LinearModel& model,
                      const CovMatrix& sigma_tree);

/// Average zero-mean log-likelihood (1/R) Σ log N(y_r; 0, H Σ̃ Hᵀ + D).
double average_log_likelihood(const ObservationSet& obs,
                              const LinearModel& model,
                              const CovMatrix& sigma_tree);

}  // namespace ltree
