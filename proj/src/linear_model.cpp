#include "ltree/linear_model.hpp"

#include "ltree/error.hpp"
#include "ltree/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

namespace ltree {

LinearModel::LinearModel(Matrix h, CovMatrix d)
    : h_(std::move(h)), d_(std::move(d)) {
  if (h_.rows() < 1 || h_.cols() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "mixing matrix H is empty");
  }
  if (h_.rows() > h_.cols()) {
    std::ostringstream msg;
    msg << "mixing matrix H must have m <= p, got " << h_.rows() << "x"
        << h_.cols();
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (static_cast<Eigen::Index>(d_.dim()) != h_.rows()) {
    std::ostringstream msg;
    msg << "noise covariance D is " << d_.dim() << "x" << d_.dim()
        << " but H has " << h_.rows() << " rows";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (!h_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "mixing matrix H has non-finite entries");
  }
}

bool LinearModel::has_full_row_rank() const {
  const Vector s = Eigen::JacobiSVD<Matrix>(h_).singularValues();
  return s(0) > 0.0 && s(s.size() - 1) > 1e-10 * s(0);
}

void LinearModel::require_full_row_rank() const {
  if (!has_full_row_rank()) {
    throw Error(ErrorCode::RankDeficient, "mixing matrix H is not of full row rank");
  }
}

ObservationSet::ObservationSet(Matrix samples) : samples_(std::move(samples)) {
  if (samples_.rows() < 1 || samples_.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "observation set is empty");
  }
  if (!samples_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "observations have non-finite entries");
  }
  const double inv_r = 1.0 / static_cast<double>(samples_.rows());
  mean_ = samples_.colwise().sum().transpose() * inv_r;
  second_moment_ = samples_.transpose() * samples_ * inv_r;
  const Matrix centered = samples_.rowwise() - mean_.transpose();
  centered_cov_ = centered.transpose() * centered * inv_r;
}

ObservationSet sample_observations(const LinearModel& model,
                                   const CovMatrix& sigma_true, std::size_t r,
                                   std::uint64_t seed) {
  if (sigma_true.dim() != model.p()) {
    std::ostringstream msg;
    msg << "sample_observations: latent covariance is " << sigma_true.dim()
        << "-dimensional but H has " << model.p() << " columns";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  if (r < 1) {
    throw Error(ErrorCode::InvalidArgument, "sample_observations: r must be >= 1");
  }
  const auto p = static_cast<Eigen::Index>(model.p());
  const auto m = static_cast<Eigen::Index>(model.m());
  const Matrix lx = sigma_true.cholesky_factor();
  const Matrix lw = model.d().cholesky_factor();

  Rng rng(seed);
  Matrix samples(static_cast<Eigen::Index>(r), m);
  Vector zx(p), zw(m);
  for (Eigen::Index k = 0; k < samples.rows(); ++k) {
    for (Eigen::Index i = 0; i < p; ++i) zx(i) = rng.normal();
    for (Eigen::Index i = 0; i < m; ++i) zw(i) = rng.normal();
    samples.row(k) = (model.h() * (lx * zx) + lw * zw).transpose();
  }
  return ObservationSet(std::move(samples));
}

CovMatrix observation_cov(const LinearModel& model, const CovMatrix& sigma) {
  if (sigma.dim() != model.p()) {
    throw Error(ErrorCode::DimensionMismatch,
                "observation_cov: covariance does not match H's column count");
  }
  Matrix q = model.h() * sigma.matrix() * model.h().transpose() +
             model.d().matrix();
  return CovMatrix(0.5 * (q + q.transpose()));
}

GaussianModel empirical_gaussian(const ObservationSet& obs) {
  const std::size_t m = obs.m();
  if (obs.r() <= m) {
    std::ostringstream msg;
    msg << "empirical covariance from " << obs.r() << " samples has rank at most "
        << obs.r() - 1 << " < " << m << " (rank deficit >= " << m - obs.r() + 1
        << ")";
    throw Error(ErrorCode::RankDeficient, msg.str());
  }
  const Vector ev =
      Eigen::SelfAdjointEigenSolver<Matrix>(obs.centered_cov(),
                                            Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  const auto rank = static_cast<std::size_t>(
      (ev.array() > 1e-12 * std::max(top, 1e-300)).count());
  if (rank < m) {
    std::ostringstream msg;
    msg << "empirical covariance has rank " << rank << " < " << m
        << " (rank deficit " << m - rank << ")";
    throw Error(ErrorCode::RankDeficient, msg.str());
  }
  try {
    return GaussianModel(CovMatrix(obs.centered_cov()));
  } catch (const Error& e) {
    throw Error(ErrorCode::RankDeficient,
                std::string("empirical covariance: ") + e.what());
  }
}

double observation_kl(const ObservationSet& obs, const LinearModel& model,
                      const CovMatrix& sigma_tree) {
  return observation_kl(empirical_gaussian(obs), model, sigma_tree);
}

double observation_kl(const GaussianModel& empirical, const LinearModel& model,
                      const CovMatrix& sigma_tree) {
  if (empirical.dim() != model.m()) {
    throw Error(ErrorCode::DimensionMismatch,
                "observation_kl: observations do not match H's row count");
  }
  return kl_gaussian(empirical.cov(), observation_cov(model, sigma_tree));
}

double average_log_likelihood(const ObservationSet& obs,
                              const LinearModel& model,
                              const CovMatrix& sigma_tree) {
  if (obs.m() != model.m()) {
    throw Error(ErrorCode::DimensionMismatch,
                "average_log_likelihood: observations do not match H");
  }
  const CovMatrix q = observation_cov(model, sigma_tree);
  // (1/R) Σ yᵀQ⁻¹y = tr(Q⁻¹ M)
  const double quad = q.llt().solve(obs.second_moment()).trace();
  const double m = static_cast<double>(obs.m());
  return -0.5 * (m * std::log(2.0 * std::numbers::pi) + q.log_det() + quad);
}

}  // namespace ltree
