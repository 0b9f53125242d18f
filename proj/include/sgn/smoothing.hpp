#pragma once

#include <cstdint>
#include <vector>

#include "sgn/kernels.hpp"
#include "sgn/moments.hpp"

namespace sgn {

/// Bandwidth ε, number of Gaussian directions L and the RNG stream for the draws.
struct SmoothingConfig {
  double eps = 0.1;
  int L = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// `count` iid N(0, I_dim) vectors from the stream keyed by `seed`.
std::vector<Eigen::VectorXd> gaussian_draws(Eigen::Index dim, int count, std::uint64_t seed);

/// Monte-Carlo estimate of ḡ_{n,ε}(θ) = E_Z[ḡ_n(θ + εZ)] over caller-supplied draws.
MomentValue mc_smoothed_moments(const MomentProblem& problem, const ParamVector& theta,
                                const SmoothingConfig& cfg,
                                const std::vector<Eigen::VectorXd>& draws,
                                Execution exec = Execution::Parallel);

/// Mean-zero adjusted Monte-Carlo estimate of the smoothed Jacobian,
///
///   Ĝ = 1/(εL) Σ_ℓ [ḡ_n(θ + εZ_ℓ) − ḡ_n(θ)] Z_ℓ',
///
/// with raw (unsmoothed) moments at the perturbed points. Perturbed points are
/// not clamped to the box. Deterministic given (θ, cfg).
Jacobian mc_jacobian(const MomentProblem& problem, const ParamVector& theta,
                     const SmoothingConfig& cfg, Execution exec = Execution::Parallel);

/// Same as above, reusing an already computed ḡ_n(θ).
Jacobian mc_jacobian(const MomentProblem& problem, const ParamVector& theta,
                     const MomentValue& moments_at_theta, const SmoothingConfig& cfg,
                     Execution exec = Execution::Parallel);

}  // namespace sgn
