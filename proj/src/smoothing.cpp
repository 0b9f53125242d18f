#include "sgn/smoothing.hpp"

#include <cmath>
#include <string>

#include "sgn/rng.hpp"

namespace sgn {

void SmoothingConfig::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("smoothing: eps must be positive");
  if (L < 1) throw ConfigError("smoothing: L must be at least 1");
}

std::vector<Eigen::VectorXd> gaussian_draws(Eigen::Index dim, int count, std::uint64_t seed) {
  NormalStream stream(seed);
  std::vector<Eigen::VectorXd> draws;
  draws.reserve(static_cast<std::size_t>(count));
  for (int l = 0; l < count; ++l) draws.push_back(stream.vector(dim));
  return draws;
}

MomentValue mc_smoothed_moments(const MomentProblem& problem, const ParamVector& theta,
                                const SmoothingConfig& cfg,
                                const std::vector<Eigen::VectorXd>& draws, Execution exec) {
  cfg.validate();
  if (draws.empty()) throw ContractError("mc_smoothed_moments: no draws supplied");
  if (theta.size() != problem.dim_theta())
    throw ContractError("mc_smoothed_moments: theta has the wrong dimension");
  const MomentValue zero = MomentValue::Zero(problem.dim_moments());
  MomentValue sum = kernels::blocked_reduce(
      exec, draws.size(), zero,
      [&](std::size_t begin, std::size_t end, MomentValue& acc) {
        for (std::size_t l = begin; l < end; ++l) {
          if (draws[l].size() != theta.size())
            throw ContractError("mc_smoothed_moments: draw has the wrong dimension");
          acc += problem.eval(theta + cfg.eps * draws[l]);
        }
      },
      16);
  return sum / static_cast<double>(draws.size());
}

Jacobian mc_jacobian(const MomentProblem& problem, const ParamVector& theta,
                     const SmoothingConfig& cfg, Execution exec) {
  return mc_jacobian(problem, theta, problem.eval(theta), cfg, exec);
}

Jacobian mc_jacobian(const MomentProblem& problem, const ParamVector& theta,
                     const MomentValue& moments_at_theta, const SmoothingConfig& cfg,
                     Execution exec) {
  cfg.validate();
  if (theta.size() != problem.dim_theta())
    throw ContractError("mc_jacobian: theta has the wrong dimension");
  if (moments_at_theta.size() != problem.dim_moments())
    throw ContractError("mc_jacobian: moment vector has the wrong dimension");

  const auto draws =
      gaussian_draws(problem.dim_theta(), cfg.L, derive_seed(cfg.seed, {tag(StreamTag::kMcJacobian)}));
  const Jacobian zero = Jacobian::Zero(problem.dim_moments(), problem.dim_theta());
  Jacobian sum = kernels::blocked_reduce(
      exec, draws.size(), zero,
      [&](std::size_t begin, std::size_t end, Jacobian& acc) {
        for (std::size_t l = begin; l < end; ++l) {
          const MomentValue diff = problem.eval(theta + cfg.eps * draws[l]) - moments_at_theta;
          acc.noalias() += diff * draws[l].transpose();
        }
      },
      16);
  return sum / (cfg.eps * static_cast<double>(cfg.L));
}

}  // namespace sgn
