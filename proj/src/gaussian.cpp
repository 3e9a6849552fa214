#include "ltree/gaussian.hpp"

#include "ltree/error.hpp"

#include <cmath>
#include <sstream>

namespace ltree {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_same_dim(const CovMatrix& a, const CovMatrix& b, const char* op) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << op << ": dimension mismatch (" << a.dim() << " vs " << b.dim() << ")";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
}

void require_vertex_pair(const CovMatrix& sigma, std::size_t u, std::size_t v) {
  if (u >= sigma.dim() || v >= sigma.dim()) {
    std::ostringstream msg;
    msg << "vertex pair (" << u << ", " << v << ") out of range for dimension "
        << sigma.dim();
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (u == v) {
    throw Error(ErrorCode::InvalidArgument,
                "vertex pair must consist of two distinct vertices");
  }
}

}  // namespace

CovMatrix::CovMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    std::ostringstream msg;
    msg << "covariance must be a non-empty square matrix, got "
        << entries_.rows() << "x" << entries_.cols();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (!entries_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "covariance has non-finite entries");
  }
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    std::ostringstream msg;
    msg << "covariance is not symmetric (max asymmetry " << asym << ")";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  if (asym > 0.0) {
    entries_ = (0.5 * (entries_ + entries_.transpose())).eval();
  }
  llt_.compute(entries_);
  if (llt_.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite,
                "covariance is not positive definite (Cholesky failed)");
  }
}

CovMatrix CovMatrix::identity(std::size_t dim) {
  return CovMatrix(Matrix::Identity(idx(dim), idx(dim)));
}

CovMatrix CovMatrix::diagonal(const Vector& diag) {
  return CovMatrix(Matrix(diag.asDiagonal()));
}

double CovMatrix::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Matrix CovMatrix::inverse() const {
  Matrix inv = llt_.solve(Matrix::Identity(entries_.rows(), entries_.cols()));
  return 0.5 * (inv + inv.transpose());
}

double kl_gaussian(const GaussianModel& p0, const GaussianModel& p1) {
  return kl_gaussian(p0.cov(), p1.cov());
}

double kl_gaussian(const CovMatrix& sigma0, const CovMatrix& sigma1) {
  require_same_dim(sigma0, sigma1, "kl_gaussian");
  if (sigma0 == sigma1) return 0.0;

  const Matrix l0 = sigma0.cholesky_factor();
  const Matrix a =
      sigma1.llt().matrixL().solve(l0).triangularView<Eigen::Lower>();

  double kl = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double t = a(j, j) * a(j, j);
    kl += (t - 1.0) - std::log1p(t - 1.0);
    for (Eigen::Index i = j + 1; i < a.rows(); ++i) kl += a(i, j) * a(i, j);
  }
  kl *= 0.5;

  if (!std::isfinite(kl)) {
    throw Error(ErrorCode::Numerical, "kl_gaussian: non-finite result");
  }
  if (kl < 0.0) {
    if (kl < -1e-12) {
      std::ostringstream msg;
      msg << "kl_gaussian: negative divergence " << kl;
      throw Error(ErrorCode::Numerical, msg.str());
    }
    kl = 0.0;
  }
  return kl;
}

double kl_tree_simplified(const CovMatrix& sigma, const CovMatrix& sigma_tree) {
  require_same_dim(sigma, sigma_tree, "kl_tree_simplified");
  return -0.5 * (sigma.log_det() - sigma_tree.log_det());
}

double correlation(const CovMatrix& sigma, std::size_t u, std::size_t v) {
  require_vertex_pair(sigma, u, v);
  const double uu = sigma(u, u);
  const double vv = sigma(v, v);
  if (uu <= 0.0 || vv <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "correlation: zero variance");
  }
  return sigma(u, v) / std::sqrt(uu * vv);
}

double pairwise_mutual_information(const CovMatrix& sigma, std::size_t u,
                                   std::size_t v) {
  const double rho = correlation(sigma, u, v);
  if (std::abs(rho) >= kDegenerateCorrelation) {
    std::ostringstream msg;
    msg << "degenerate correlation " << rho << " between vertices " << u
        << " and " << v;
    throw Error(ErrorCode::DegenerateCorrelation, msg.str());
  }
  return -0.5 * std::log1p(-rho * rho);
}

}  // namespace ltree
