#pragma once

// Test-only generators and reference implementations. The oracles here use
// dense textbook formulas (explicit inverses and determinants) so they stay
// independent of the factorization paths in the library.

#include "ltree/chow_liu.hpp"
#include "ltree/gaussian.hpp"
#include "ltree/linear_model.hpp"
#include "ltree/rng.hpp"

#include <Eigen/LU>

#include <cmath>
#include <cstdint>
#include <vector>

namespace ltree::testing {

/// Random SPD matrix with heterogeneous scales: S W S with W a Wishart draw
/// of p + 2 degrees of freedom, S a random positive diagonal.
inline CovMatrix random_spd(std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  const auto n = static_cast<Eigen::Index>(p);
  Matrix a(n, n + 2);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
  }
  Vector scale(n);
  for (Eigen::Index i = 0; i < n; ++i) scale(i) = rng.uniform(0.5, 2.0);
  Matrix w = scale.asDiagonal() * (a * a.transpose() / double(n + 2)) *
             scale.asDiagonal();
  return CovMatrix(0.5 * (w + w.transpose()));
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.normal();
  }
  return m;
}

inline SpanningTree random_tree(std::size_t p, Rng& rng) {
  if (p == 1) return SpanningTree(1, {});
  std::vector<std::size_t> seq(p - 2);
  for (auto& s : seq) s = rng.below(p);
  return decode_pruefer(p, seq);
}

/// ½(tr(Σ₁⁻¹Σ₀) − p + ln det Σ₁ − ln det Σ₀) with dense LU.
inline double dense_kl(const Matrix& s0, const Matrix& s1) {
  const double p = static_cast<double>(s0.rows());
  return 0.5 * ((s1.inverse() * s0).trace() - p +
                std::log(s1.determinant()) - std::log(s0.determinant()));
}

/// (1/R) Σ_r [C + μ_r μ_rᵀ] with μ_r = C Hᵀ D⁻¹ y_r and
/// C = (Σ̃⁻¹ + Hᵀ D⁻¹ H)⁻¹, evaluated sample by sample.
inline Matrix samplewise_omega(const Matrix& sigma_tree, const Matrix& h,
                               const Matrix& d, const Matrix& samples) {
  const Matrix d_inv = d.inverse();
  const Matrix c = (sigma_tree.inverse() + h.transpose() * d_inv * h).inverse();
  Matrix acc = Matrix::Zero(sigma_tree.rows(), sigma_tree.cols());
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    const Vector y = samples.row(r).transpose();
    const Vector mu = c * h.transpose() * d_inv * y;
    acc += c + mu * mu.transpose();
  }
  return acc / static_cast<double>(samples.rows());
}

/// Unit-diagonal 3×3 correlation matrix.
inline CovMatrix corr3(double r12, double r23, double r13) {
  Matrix m(3, 3);
  m << 1.0, r12, r13, r12, 1.0, r23, r13, r23, 1.0;
  return CovMatrix(m);
}

}  // namespace ltree::testing
