#pragma once

#include <cstdint>

#include "sgn/solver.hpp"

namespace sgn {

/// The convolution-smoothed surface ḡ_{n,ε} of a problem, exposed as a problem.
///
/// Uses the closed form when the problem has one, then the problem's own
/// smoothed surrogate, and otherwise a Monte-Carlo average over `mc_draws`
/// frozen Gaussian directions.
class SmoothedMomentsView final : public MomentProblem {
 public:
  SmoothedMomentsView(const MomentProblem& base, double eps, int mc_draws = 200,
                      std::uint64_t seed = 0);

  Eigen::Index dim_theta() const override { return base_.dim_theta(); }
  Eigen::Index dim_moments() const override { return base_.dim_moments(); }
  Eigen::Index sample_size() const override { return base_.sample_size(); }
  const ParamBox& box() const override { return base_.box(); }
  MomentValue eval(const ParamVector& theta) const override;
  /// The closed-form smoothed Jacobian of the base problem at the view's own ε.
  std::optional<SmoothedEval> closed_form_smoothed(const ParamVector& theta, double eps) const override;

  bool has_closed_form() const { return closed_form_; }

 private:
  const MomentProblem& base_;
  double eps_;
  bool closed_form_ = false;
  std::unique_ptr<MomentProblem> surrogate_;
  std::vector<Eigen::VectorXd> draws_;
};

/// Gauss-Newton on the smoothed moments (smoothed GMM): the same loop as
/// `solve`, with ḡ_{n,ε} in place of ḡ_n in both steps. Its fixed point is the
/// minimizer of the smoothed objective, which carries smoothing bias.
SolverResult baseline_smoothed_gn_solve(const MomentProblem& problem, const WeightMatrix& w,
                                        const SolverConfig& cfg);

}  // namespace sgn
