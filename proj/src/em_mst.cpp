#include "ltree/em_mst.hpp"

#include "ltree/error.hpp"

#include <sstream>

namespace ltree {

namespace {

Matrix symmetrized(const Matrix& a) { return 0.5 * (a + a.transpose()); }

CovMatrix as_cov(Matrix a, const char* what) {
  try {
    return CovMatrix(symmetrized(a));
  } catch (const Error& e) {
    throw Error(ErrorCode::Numerical, std::string(what) + ": " + e.what());
  }
}

}  // namespace

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::EpsilonReached: return "epsilon";
    case StopReason::LmaxReached: return "lmax";
  }
  return "unknown";
}

PosteriorGaussian posterior(const CovMatrix& sigma_tree, const LinearModel& model,
                            const SpanningTree* tree) {
  if (sigma_tree.dim() != model.p()) {
    std::ostringstream msg;
    msg << "posterior: prior is " << sigma_tree.dim()
        << "-dimensional but H has " << model.p() << " columns";
    throw Error(ErrorCode::DimensionMismatch, msg.str());
  }
  const Matrix ht_dinv = model.d().llt().solve(model.h()).transpose();
  const Matrix prior_precision =
      tree ? tree_precision(sigma_tree, *tree) : sigma_tree.inverse();

  const Eigen::LLT<Matrix> info(
      symmetrized(prior_precision + ht_dinv * model.h()));
  if (info.info() != Eigen::Success) {
    throw Error(ErrorCode::Numerical,
                "posterior: information matrix is not positive definite");
  }
  const auto p = static_cast<Eigen::Index>(model.p());
  CovMatrix cov = as_cov(info.solve(Matrix::Identity(p, p)), "posterior covariance");
  Matrix gain = cov.matrix() * ht_dinv;
  return {std::move(gain), std::move(cov)};
}

CovMatrix compute_omega(const CovMatrix& sigma_tree, const LinearModel& model,
                        const ObservationSet& obs, const SpanningTree* tree) {
  if (obs.m() != model.m()) {
    throw Error(ErrorCode::DimensionMismatch,
                "compute_omega: observation length does not match H's rows");
  }
  const PosteriorGaussian post = posterior(sigma_tree, model, tree);
  return as_cov(post.cov.matrix() +
                    post.gain * obs.second_moment() * post.gain.transpose(),
                "omega");
}

TreeApproxResult em_step(const CovMatrix& sigma_tree, const LinearModel& model,
                         const ObservationSet& obs, const SpanningTree* tree) {
  return chow_liu(compute_omega(sigma_tree, model, obs, tree));
}

std::optional<std::size_t> EmTrace::best_latent_index() const {
  std::optional<std::size_t> best;
  double best_kl = 0.0;
  for (const auto& it : iterations) {
    if (!it.latent_kl) return std::nullopt;
    if (!best || *it.latent_kl < best_kl) {
      best = it.index;
      best_kl = *it.latent_kl;
    }
  }
  return best;
}

EmTrace run_em(const EmConfig& config, const LinearModel& model,
               const ObservationSet& obs,
               const std::optional<CovMatrix>& ground_truth) {
  if (!(config.epsilon > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "run_em: epsilon must be positive");
  }
  if (config.l_max < 1) {
    throw Error(ErrorCode::InvalidArgument, "run_em: l_max must be >= 1");
  }
  if (config.sigma0.dim() != model.p()) {
    throw Error(ErrorCode::DimensionMismatch,
                "run_em: initial covariance does not match H's column count");
  }
  if (obs.m() != model.m()) {
    throw Error(ErrorCode::DimensionMismatch,
                "run_em: observation length does not match H's row count");
  }
  if (ground_truth && ground_truth->dim() != model.p()) {
    throw Error(ErrorCode::DimensionMismatch,
                "run_em: ground truth does not match H's column count");
  }
  model.require_full_row_rank();

  const GaussianModel empirical = empirical_gaussian(obs);
  EmTrace trace;
  auto record = [&](TreeApproxResult step, std::optional<double> step_kl) {
    const double obs_kl = observation_kl(empirical, model, step.cov);
    std::optional<double> latent_kl;
    if (ground_truth) latent_kl = kl_gaussian(*ground_truth, step.cov);
    if (!trace.iterations.empty() &&
        obs_kl > trace.iterations.back().obs_kl + kMonotonicitySlack) {
      ++trace.monotonicity_violations;
    }
    trace.iterations.push_back({trace.iterations.size() + 1, std::move(step.cov),
                                std::move(step.tree), obs_kl, latent_kl, step_kl});
  };

  record(chow_liu(config.sigma0), std::nullopt);
  trace.stop_reason = StopReason::LmaxReached;
  while (trace.iterations.size() < config.l_max) {
    const EmIteration& prev = trace.iterations.back();
    TreeApproxResult next = em_step(prev.sigma_tree, model, obs, &prev.tree);
    const double step_kl = kl_gaussian(prev.sigma_tree, next.cov);
    record(std::move(next), step_kl);
    if (step_kl < config.epsilon) {
      trace.stop_reason = StopReason::EpsilonReached;
      break;
    }
  }
  return trace;
}

}  // namespace ltree
