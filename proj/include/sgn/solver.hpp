#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sgn/covering.hpp"
#include "sgn/moments.hpp"
#include "sgn/qn.hpp"
#include "sgn/stats.hpp"

namespace sgn {

enum class JacobianMode { ClosedForm, MonteCarlo, QuasiNewton };

struct JacobianConfig {
  JacobianMode mode = JacobianMode::QuasiNewton;
  /// Number of directions (MonteCarlo) or window length (QuasiNewton).
  /// Zero selects max(25, ceil(1.5 d_theta)).
  int L = 0;
  int directions_per_iter = 1;
  QnEstimator estimator = QnEstimator::LeastSquares;
};

struct StoppingRule {
  enum class Mode { FixedIterations, ChiSquarePlusJ };
  Mode mode = Mode::FixedIterations;
  double level = 0.95;
  int extra_j = 0;

  static StoppingRule fixed() { return {}; }
  static StoppingRule chi_square(double level, int extra_j) {
    return {Mode::ChiSquarePlusJ, level, extra_j};
  }
};

enum class StepKind { Local, GlobalReplaced };
enum class StopReason { FixedIterations, ChiSquare };

const char* to_string(StepKind kind);
const char* to_string(StopReason reason);

/// One row of the solver trace: the iterate θ_b and how θ_{b+1} was produced from it.
struct IterationRecord {
  int b = 0;
  ParamVector theta;
  double obj_norm = 0.0;            // ‖ḡ_n(θ_b)‖_W
  StepKind step_kind = StepKind::Local;
  double jacobian_sigma_min = 0.0;  // smallest singular value of G_b
  bool regularized = false;         // minimum-norm solve used for the local step
  bool clamped = false;             // local step hit the box
};

struct SolverResult {
  ParamVector theta_best;
  double best_obj_norm = std::numeric_limits<double>::infinity();
  int best_index = -1;
  int iterations_run = 0;
  std::vector<IterationRecord> trace;
  StopReason stopped_by = StopReason::FixedIterations;
};

struct SolverConfig {
  double gamma = 0.1;
  /// Bandwidth; n^{-1/4} when unset.
  std::optional<double> eps;
  double alpha = 0.0;
  JacobianConfig jacobian;
  /// Global-step sequence; unset runs the local step only.
  std::optional<CoveringOptions> covering = CoveringOptions{};
  int b_max = 300;
  StoppingRule stop;
  double sigma_tol = 1e-10;
  /// Starting value; the first covering point (or the box center) when unset.
  std::optional<ParamVector> theta0;
  /// Seed of the Monte-Carlo / quasi-Newton direction streams.
  std::uint64_t seed = 0;

  void validate() const;
  double resolve_eps(Eigen::Index n) const;
};

/// Raised when the solver cannot continue; carries the iterations completed so far.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<IterationRecord> trace)
      : Error(what), trace_(std::move(trace)) {}
  const char* kind() const noexcept override { return "solver"; }
  const std::vector<IterationRecord>& trace() const { return trace_; }

 private:
  std::vector<IterationRecord> trace_;
};

struct LocalStepResult {
  ParamVector theta;
  double sigma_min = 0.0;
  bool regularized = false;
  bool clamped = false;
};

/// θ_b − γ (G'WG)⁻¹ G'W ḡ_n(θ_b) + α(θ_b − θ_prev), clamped to the box.
///
/// The weighted least-squares problem is solved by QR of LᵀG (W = LLᵀ); when
/// σ_min(G) < sigma_tol a minimum-norm SVD step is taken instead.
LocalStepResult local_step(const MomentProblem& problem, const ParamVector& theta,
                           const ParamVector& theta_prev, const MomentValue& moments_at_theta,
                           const Jacobian& jacobian, const WeightMatrix& w, double gamma,
                           double alpha, double sigma_tol = 1e-10);
LocalStepResult local_step(const MomentProblem& problem, const ParamVector& theta,
                           const ParamVector& theta_prev, const Jacobian& jacobian,
                           const WeightMatrix& w, double gamma, double alpha,
                           double sigma_tol = 1e-10);

struct GlobalStepResult {
  ParamVector theta;
  MomentValue moments;
  double obj_norm = 0.0;
  StepKind kind = StepKind::Local;
};

/// Keep the local point unless the candidate has a strictly smaller weighted
/// moment norm. Evaluates the moments once, at the candidate.
GlobalStepResult global_step(const MomentProblem& problem, const ParamVector& theta_local,
                             const MomentValue& moments_local, const ParamVector& candidate,
                             const WeightMatrix& w);
GlobalStepResult global_step(const MomentProblem& problem, const ParamVector& theta_local,
                             const ParamVector& candidate, const WeightMatrix& w);

/// Whether the solver should stop after the last record of `trace`.
bool stopping_check(const std::vector<IterationRecord>& trace, const StoppingRule& rule,
                    Eigen::Index p, Eigen::Index n, int b_max = std::numeric_limits<int>::max());

/// χ²_p(level) / n, the bound on the squared weighted norm.
double chi2_threshold(Eigen::Index p, Eigen::Index n, double level);

/// Smoothed Gauss-Newton with global covering step; returns the best iterate.
SolverResult solve(const MomentProblem& problem, const WeightMatrix& w, const SolverConfig& cfg);

/// Companion matrix [[1 − γ + α, −α], [1, 0]] of the heavy-ball recursion.
Eigen::Matrix2d companion_matrix(double gamma, double alpha);

/// Effective rate 1 − ρ(A(γ, α)) with ρ the spectral radius, clipped to [0, 1].
double companion_rate(double gamma, double alpha);

struct MomentumChoice {
  double alpha = 0.0;
  double rate = 0.0;
};

/// Grid search over α ∈ {0, 0.001, ..., 0.999} maximizing companion_rate.
MomentumChoice optimal_alpha(double gamma);

void write_trace_csv(std::ostream& out, const SolverResult& result);

}  // namespace sgn
