#include "sgn/baseline.hpp"

#include "sgn/rng.hpp"
#include "sgn/smoothing.hpp"

namespace sgn {

SmoothedMomentsView::SmoothedMomentsView(const MomentProblem& base, double eps, int mc_draws,
                                         std::uint64_t seed)
    : base_(base), eps_(eps) {
  if (!(eps > 0.0)) throw ConfigError("smoothed view: eps must be positive");
  closed_form_ = base_.closed_form_smoothed(base_.box().center(), eps_).has_value();
  if (closed_form_) return;
  surrogate_ = base_.smoothed_surrogate(eps_);
  if (surrogate_) return;
  if (mc_draws < 1) throw ConfigError("smoothed view: need at least one Monte-Carlo draw");
  draws_ = gaussian_draws(base_.dim_theta(), mc_draws,
                          derive_seed(seed, {tag(StreamTag::kSmoothingDraws)}));
}

MomentValue SmoothedMomentsView::eval(const ParamVector& theta) const {
  if (closed_form_) return base_.closed_form_smoothed(theta, eps_)->moments;
  if (surrogate_) return surrogate_->eval(theta);
  return mc_smoothed_moments(base_, theta, SmoothingConfig{eps_, static_cast<int>(draws_.size()), 0},
                             draws_);
}

std::optional<SmoothedEval> SmoothedMomentsView::closed_form_smoothed(const ParamVector& theta,
                                                                      double) const {
  if (!closed_form_) return std::nullopt;
  return base_.closed_form_smoothed(theta, eps_);
}

SolverResult baseline_smoothed_gn_solve(const MomentProblem& problem, const WeightMatrix& w,
                                        const SolverConfig& cfg) {
  cfg.validate();
  const double eps = cfg.resolve_eps(problem.sample_size());
  const SmoothedMomentsView view(problem, eps, 200, cfg.seed);
  SolverConfig smoothed_cfg = cfg;
  smoothed_cfg.eps = eps;
  if (view.has_closed_form()) smoothed_cfg.jacobian.mode = JacobianMode::ClosedForm;
  else if (smoothed_cfg.jacobian.mode == JacobianMode::ClosedForm)
    throw ConfigError("baseline: problem has no closed-form smoothed Jacobian");
  return solve(view, w, smoothed_cfg);
}

}  // namespace sgn
