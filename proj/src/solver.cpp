#include "sgn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sgn/rng.hpp"
#include "sgn/smoothing.hpp"

namespace sgn {

const char* to_string(StepKind kind) {
  return kind == StepKind::Local ? "local" : "global";
}

const char* to_string(StopReason reason) {
  return reason == StopReason::FixedIterations ? "fixed_iterations" : "chi_square";
}

void SolverConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("solver: gamma must lie in (0, 1)");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("solver: alpha must lie in [0, 1)");
  if (eps && !(*eps > 0.0 && std::isfinite(*eps))) throw ConfigError("solver: eps must be positive");
  if (b_max < 1) throw ConfigError("solver: b_max must be >= 1");
  if (!(sigma_tol > 0.0)) throw ConfigError("solver: sigma_tol must be positive");
  if (jacobian.L < 0) throw ConfigError("solver: L must be >= 0");
  if (jacobian.directions_per_iter < 1) throw ConfigError("solver: directions_per_iter must be >= 1");
  if (stop.mode == StoppingRule::Mode::ChiSquarePlusJ) {
    if (!(stop.level > 0.0 && stop.level < 1.0)) throw ConfigError("solver: stop level must lie in (0, 1)");
    if (stop.extra_j < 0) throw ConfigError("solver: extra_j must be >= 0");
  }
}

double SolverConfig::resolve_eps(Eigen::Index n) const {
  if (eps) return *eps;
  return std::pow(static_cast<double>(std::max<Eigen::Index>(n, 1)), -0.25);
}

namespace {

double smallest_singular_value(const Jacobian& g) {
  if (g.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
  const auto& s = svd.singularValues();
  return g.rows() < g.cols() ? 0.0 : s[s.size() - 1];
}

}  // namespace

LocalStepResult local_step(const MomentProblem& problem, const ParamVector& theta,
                           const ParamVector& theta_prev, const MomentValue& moments_at_theta,
                           const Jacobian& jacobian, const WeightMatrix& w, double gamma,
                           double alpha, double sigma_tol) {
  const Eigen::Index d = problem.dim_theta();
  const Eigen::Index p = problem.dim_moments();
  if (theta.size() != d || theta_prev.size() != d)
    throw ContractError("local_step: theta has the wrong dimension");
  if (jacobian.rows() != p || jacobian.cols() != d)
    throw ContractError("local_step: Jacobian has the wrong shape");
  if (moments_at_theta.size() != p || w.dim() != p)
    throw ContractError("local_step: moment or weight dimension mismatch");

  LocalStepResult out;
  out.sigma_min = smallest_singular_value(jacobian);

  // ‖v‖²_W = ‖Lᵀv‖², so the Gauss-Newton direction is the least-squares
  // solution of (LᵀG) δ ≈ Lᵀḡ.
  const Eigen::MatrixXd lt = w.cholesky_lower().transpose();
  const Eigen::MatrixXd a = lt * jacobian;
  const Eigen::VectorXd r = lt * moments_at_theta;
  Eigen::VectorXd direction;
  if (out.sigma_min >= sigma_tol && std::isfinite(out.sigma_min)) {
    direction = a.colPivHouseholderQr().solve(r);
  } else {
    out.regularized = true;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = std::max(sigma_tol, 1e-12 * (s.size() > 0 ? s[0] : 0.0));
    Eigen::VectorXd coeff = svd.matrixU().transpose() * r;
    for (Eigen::Index i = 0; i < s.size(); ++i) coeff[i] = s[i] > cutoff ? coeff[i] / s[i] : 0.0;
    direction = svd.matrixV() * coeff;
  }

  ParamVector next = theta - gamma * direction;
  if (alpha != 0.0) next += alpha * (theta - theta_prev);
  if (!next.allFinite()) {
    // A non-finite step (e.g. from a NaN Jacobian) leaves θ in place.
    next = theta;
    out.regularized = true;
  }
  out.theta = clamp_to_box(next, problem.box());
  out.clamped = (out.theta.array() != next.array()).any();
  return out;
}

LocalStepResult local_step(const MomentProblem& problem, const ParamVector& theta,
                           const ParamVector& theta_prev, const Jacobian& jacobian,
                           const WeightMatrix& w, double gamma, double alpha, double sigma_tol) {
  return local_step(problem, theta, theta_prev, problem.eval(theta), jacobian, w, gamma, alpha,
                    sigma_tol);
}

GlobalStepResult global_step(const MomentProblem& problem, const ParamVector& theta_local,
                             const MomentValue& moments_local, const ParamVector& candidate,
                             const WeightMatrix& w) {
  const double local_norm = weighted_norm(moments_local, w);
  MomentValue cand_moments = problem.eval(candidate);
  const double cand_norm = weighted_norm(cand_moments, w);
  if (cand_norm < local_norm)
    return {candidate, std::move(cand_moments), cand_norm, StepKind::GlobalReplaced};
  return {theta_local, moments_local, local_norm, StepKind::Local};
}

GlobalStepResult global_step(const MomentProblem& problem, const ParamVector& theta_local,
                             const ParamVector& candidate, const WeightMatrix& w) {
  return global_step(problem, theta_local, problem.eval(theta_local), candidate, w);
}

double chi2_threshold(Eigen::Index p, Eigen::Index n, double level) {
  if (n < 1) throw ContractError("chi2_threshold: n must be >= 1");
  return chi2_quantile(static_cast<int>(p), level) / static_cast<double>(n);
}

bool stopping_check(const std::vector<IterationRecord>& trace, const StoppingRule& rule,
                    Eigen::Index p, Eigen::Index n, int b_max) {
  if (trace.empty()) throw ContractError("stopping_check: empty trace");
  const auto size = static_cast<long long>(trace.size());
  if (size >= b_max) return true;
  if (rule.mode == StoppingRule::Mode::FixedIterations) return false;
  const double threshold = chi2_threshold(p, n, rule.level);
  for (long long k = 0; k < size; ++k) {
    const double norm = trace[static_cast<std::size_t>(k)].obj_norm;
    if (norm * norm <= threshold) return size >= k + rule.extra_j + 1;
  }
  return false;
}

namespace {

class JacobianSource {
 public:
  JacobianSource(const MomentProblem& problem, const SolverConfig& cfg, double eps)
      : problem_(problem), cfg_(cfg), eps_(eps) {
    L_ = cfg.jacobian.L > 0 ? cfg.jacobian.L : default_qn_window(problem.dim_theta());
  }

  Jacobian at(int b, const ParamVector& theta, const MomentValue& g) {
    switch (cfg_.jacobian.mode) {
      case JacobianMode::ClosedForm: {
        auto sm = problem_.closed_form_smoothed(theta, eps_);
        if (!sm) throw ConfigError("solver: problem has no closed-form smoothed Jacobian");
        return std::move(sm->jacobian);
      }
      case JacobianMode::MonteCarlo: {
        SmoothingConfig sc{eps_, L_, derive_seed(cfg_.seed, {static_cast<std::uint64_t>(b)})};
        return mc_jacobian(problem_, theta, g, sc);
      }
      case JacobianMode::QuasiNewton: {
        if (!buffer_) {
          buffer_ = QnBuffer::init(problem_, theta, g, eps_, L_, cfg_.seed, cfg_.jacobian.estimator);
        } else {
          buffer_->update(problem_, theta, g, cfg_.jacobian.directions_per_iter);
        }
        // Gaussian designs are almost surely full rank; retry a few fresh directions.
        for (int attempt = 0;; ++attempt) {
          try {
            return buffer_->estimate();
          } catch (const RankDeficientError&) {
            if (attempt >= 3) throw;
            buffer_->update(problem_, theta, g, 1);
          }
        }
      }
    }
    throw ConfigError("solver: unknown Jacobian mode");
  }

 private:
  const MomentProblem& problem_;
  const SolverConfig& cfg_;
  double eps_;
  int L_ = 0;
  std::optional<QnBuffer> buffer_;
};

}  // namespace

SolverResult solve(const MomentProblem& problem, const WeightMatrix& w, const SolverConfig& cfg) {
  cfg.validate();
  const Eigen::Index d = problem.dim_theta();
  const Eigen::Index p = problem.dim_moments();
  if (w.dim() != p) throw ContractError("solve: weight matrix dimension does not match moments");
  const double eps = cfg.resolve_eps(problem.sample_size());

  std::optional<CoveringSequence> cover;
  if (cfg.covering) cover.emplace(problem.box(), *cfg.covering);

  ParamVector theta;
  if (cfg.theta0) {
    if (cfg.theta0->size() != d) throw ConfigError("solve: theta0 has the wrong dimension");
    require_finite(*cfg.theta0, "solve: theta0");
    theta = clamp_to_box(*cfg.theta0, problem.box());
  } else if (cover) {
    theta = cover->next_point();
  } else {
    theta = problem.box().center();
  }

  SolverResult result;
  auto fail = [&](const std::string& what) -> SolverError {
    return SolverError(what, std::move(result.trace));
  };

  MomentValue g;
  try {
    g = problem.eval(theta);
  } catch (const EvaluationError& e) {
    throw fail(std::string("solve: moments not available at theta0: ") + e.what());
  }
  double norm = weighted_norm(g, w);
  ParamVector theta_prev = theta;
  JacobianSource jac(problem, cfg, eps);

  for (int b = 0;; ++b) {
    Jacobian gb;
    try {
      gb = jac.at(b, theta, g);
    } catch (const RankDeficientError& e) {
      throw fail(e.what());
    } catch (const EvaluationError& e) {
      throw fail(std::string("solve: Jacobian evaluation failed: ") + e.what());
    }

    const LocalStepResult ls =
        local_step(problem, theta, theta_prev, g, gb, w, cfg.gamma, cfg.alpha, cfg.sigma_tol);
    MomentValue g_next;
    try {
      g_next = problem.eval(ls.theta);
    } catch (const EvaluationError& e) {
      throw fail(std::string("solve: moments not available after local step: ") + e.what());
    }
    GlobalStepResult step{ls.theta, std::move(g_next), 0.0, StepKind::Local};
    step.obj_norm = weighted_norm(step.moments, w);
    if (cover) {
      const ParamVector candidate = cover->next_point();
      try {
        step = global_step(problem, step.theta, step.moments, candidate, w);
      } catch (const EvaluationError&) {
        // a candidate without moments cannot beat the local point
      }
    }

    result.trace.push_back({b, theta, norm, step.kind, ls.sigma_min, ls.regularized, ls.clamped});
    if (norm < result.best_obj_norm) {
      result.best_obj_norm = norm;
      result.best_index = b;
      result.theta_best = theta;
    }
    if (stopping_check(result.trace, cfg.stop, p, problem.sample_size(), cfg.b_max)) {
      const bool by_chi2 = cfg.stop.mode == StoppingRule::Mode::ChiSquarePlusJ &&
                           stopping_check(result.trace, cfg.stop, p, problem.sample_size());
      result.stopped_by = by_chi2 ? StopReason::ChiSquare : StopReason::FixedIterations;
      break;
    }

    // Momentum does not carry across a jump to a covering point.
    theta_prev = step.kind == StepKind::GlobalReplaced ? step.theta : theta;
    theta = std::move(step.theta);
    g = std::move(step.moments);
    norm = step.obj_norm;
  }
  result.iterations_run = static_cast<int>(result.trace.size());
  return result;
}

Eigen::Matrix2d companion_matrix(double gamma, double alpha) {
  Eigen::Matrix2d a;
  a << 1.0 - gamma + alpha, -alpha, 1.0, 0.0;
  return a;
}

double companion_rate(double gamma, double alpha) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ContractError("companion_rate: gamma must lie in (0, 1)");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ContractError("companion_rate: alpha must lie in [0, 1)");
  // Eigenvalues 1 − γ and 0.
  if (alpha == 0.0) return gamma;
  // λ² − (1 − γ + α) λ + α = 0
  const double trace = 1.0 - gamma + alpha;
  const double disc = trace * trace - 4.0 * alpha;
  double radius;
  if (disc >= 0.0) {
    const double root = std::sqrt(disc);
    radius = std::max(std::fabs(0.5 * (trace + root)), std::fabs(0.5 * (trace - root)));
  } else {
    radius = std::sqrt(alpha);  // |λ|² = product of the conjugate pair
  }
  return std::clamp(1.0 - radius, 0.0, 1.0);
}

MomentumChoice optimal_alpha(double gamma) {
  MomentumChoice best{0.0, companion_rate(gamma, 0.0)};
  for (int k = 1; k < 1000; ++k) {
    const double alpha = k * 1e-3;
    const double rate = companion_rate(gamma, alpha);
    if (rate > best.rate) best = {alpha, rate};
  }
  return best;
}

void write_trace_csv(std::ostream& out, const SolverResult& result) {
  const Eigen::Index d = result.trace.empty() ? 0 : result.trace.front().theta.size();
  out << "b";
  for (Eigen::Index i = 0; i < d; ++i) out << ",theta_" << i;
  out << ",obj_norm,step_kind,sigma_min\n";
  const auto precision = out.precision(17);
  for (const auto& r : result.trace) {
    out << r.b;
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << r.theta[i];
    out << ',' << r.obj_norm << ',' << to_string(r.step_kind) << ',' << r.jacobian_sigma_min << '\n';
  }
  out.precision(precision);
}

}  // namespace sgn
