#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cstddef>

namespace ltree {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Symmetric positive definite matrix. Validated once at construction and
/// immutable afterwards; the Cholesky factor is kept alongside the entries.
///
/// Construction accepts asymmetry up to kSymmetryTolerance (max absolute
/// entry difference) and stores the symmetrized matrix. Positive
/// definiteness is established by a successful LLT factorization.
class CovMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-10;

  explicit CovMatrix(Matrix entries);

  static CovMatrix identity(std::size_t dim);
  static CovMatrix diagonal(const Vector& diag);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& matrix() const { return entries_; }
  double operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  /// Lower triangular factor L with L Lᵀ = matrix().
  Matrix cholesky_factor() const { return llt_.matrixL(); }
  const Eigen::LLT<Matrix>& llt() const { return llt_; }

  double log_det() const;
  Matrix inverse() const;

  bool operator==(const CovMatrix& other) const {
    return entries_.rows() == other.entries_.rows() &&
           entries_ == other.entries_;
  }

 private:
  Matrix entries_;
  Eigen::LLT<Matrix> llt_;
};

/// Zero-mean multivariate normal.
class GaussianModel {
 public:
  explicit GaussianModel(CovMatrix cov) : cov_(std::move(cov)) {}

  std::size_t dim() const { return cov_.dim(); }
  const CovMatrix& cov() const { return cov_; }

 private:
  CovMatrix cov_;
};

/// KL(p0 ‖ p1) in nats for zero-mean Gaussians:
///   ½ (tr(Σ₁⁻¹Σ₀) − p + ln|Σ₁| − ln|Σ₀|).
///
/// Evaluated from A = L₁⁻¹L₀ (lower triangular) as
///   ½ Σᵢ (Aᵢᵢ² − 1 − ln Aᵢᵢ²) + ½ Σ_{i>j} Aᵢⱼ²,
/// a sum of nonnegative terms. Results in [−1e-12, 0) are clamped to zero,
/// anything more negative throws ErrorCode::Numerical.
double kl_gaussian(const GaussianModel& p0, const GaussianModel& p1);
double kl_gaussian(const CovMatrix& sigma0, const CovMatrix& sigma1);

/// −½ ln |Σ Σ̃⁻¹|. Equals kl_gaussian(Σ, Σ̃) only when Σ̃ matches Σ's
/// marginals on the variance diagonal and on the tree edges of Σ̃.
double kl_tree_simplified(const CovMatrix& sigma, const CovMatrix& sigma_tree);

double correlation(const CovMatrix& sigma, std::size_t u, std::size_t v);

/// Gaussian mutual information −½ ln(1 − ρ²ᵤᵥ) in nats.
double pairwise_mutual_information(const CovMatrix& sigma, std::size_t u,
                                   std::size_t v);

/// Correlations with |ρ| at or above this are treated as degenerate.
inline constexpr double kDegenerateCorrelation = 1.0 - 1e-12;

}  // namespace ltree
