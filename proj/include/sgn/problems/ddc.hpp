#pragma once

#include <cstdint>
#include <iosfwd>

#include "sgn/kernels.hpp"
#include "sgn/moments.hpp"

namespace sgn {

/// Panel dimensions of the dynamic discrete choice model.
struct DdcDesign {
  Eigen::Index n = 250;
  Eigen::Index T = 10;
  Eigen::Index beta_dim = 14;
};

/// θ† = (1/√5, ..., 1/√5, 0, ..., 0, ρ = 0.7) with five nonzero slopes.
ParamVector ddc_true_params(Eigen::Index beta_dim);

/// Default box: β ∈ [−2, 2], ρ ∈ [−1, 1].
ParamBox ddc_default_box(Eigen::Index beta_dim);

/// Simulated method of moments for the panel binary choice model
///
///   y_it = 1{x_it'β + u_it > 0},  u_it = e_it + ρ e_{i,t−1},  e_it ~ N(0, 1),
///
/// with θ = (β, ρ). The moments are the difference between pooled OLS
/// coefficients of y_it on (x_it, y_{i,t−1}, 1) in the observed panel and in a
/// panel simulated at θ from shocks frozen at construction. Period 0 is a
/// burn-in that supplies y_{i0}; regressions use periods 1..T.
class DdcProblem final : public MomentProblem {
 public:
  /// `x` has n(T+1) rows (individual-major, periods 0..T) and beta_dim columns;
  /// `y` has n(T+1) entries in the same layout.
  DdcProblem(DdcDesign design, Eigen::MatrixXd x, Eigen::VectorXd y, std::uint64_t sim_seed,
             ParamBox box);
  /// Explicit n × (T+2) simulation shocks.
  DdcProblem(DdcDesign design, Eigen::MatrixXd x, Eigen::VectorXd y, Eigen::MatrixXd shocks,
             ParamBox box);

  /// Observed panel drawn at `theta_dagger` with x_it iid N(0, 1).
  static DdcProblem generate(DdcDesign design, const ParamVector& theta_dagger,
                             std::uint64_t data_seed, std::uint64_t sim_seed, ParamBox box);
  static DdcProblem generate(DdcDesign design, std::uint64_t data_seed, std::uint64_t sim_seed);
  static DdcProblem read_csv(std::istream& in, std::uint64_t sim_seed, ParamBox box);
  void write_csv(std::ostream& out) const;

  Eigen::Index dim_theta() const override { return design_.beta_dim + 1; }
  Eigen::Index dim_moments() const override { return design_.beta_dim + 2; }
  Eigen::Index sample_size() const override { return design_.n; }
  const ParamBox& box() const override { return box_; }

  MomentValue eval(const ParamVector& theta) const override;
  std::unique_ptr<MomentProblem> smoothed_surrogate(double eps) const override;

  /// Moments with 1{· > 0} replaced by Φ(·/ε) in the simulated panel.
  MomentValue smoothed_moments(const ParamVector& theta, double eps) const;

  /// Simulated-panel OLS coefficients at θ (eps = 0: indicator link).
  Eigen::VectorXd simulated_ols(const ParamVector& theta, double eps = 0.0,
                                Execution exec = Execution::Parallel) const;

  const DdcDesign& design() const { return design_; }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::VectorXd& y() const { return y_; }
  /// n × (T+2) simulation shocks; column c holds e_{i,c−1}.
  const Eigen::MatrixXd& sim_shocks() const { return shocks_; }
  const Eigen::VectorXd& observed_ols() const { return observed_ols_; }

 private:
  DdcDesign design_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd shocks_;
  Eigen::VectorXd observed_ols_;
  ParamBox box_;
};

/// Pooled OLS of y_it on (x_it, y_{i,t−1}, 1) over periods 1..T of a stored panel.
Eigen::VectorXd ddc_panel_ols(const DdcDesign& design, const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y, Execution exec = Execution::Parallel);

/// n × (T+2) iid N(0, 1) shocks.
Eigen::MatrixXd ddc_draw_shocks(const DdcDesign& design, std::uint64_t seed);

/// y panel (n(T+1) entries) from the latent index with the given shocks.
Eigen::VectorXd ddc_simulate(const DdcDesign& design, const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& shocks, const ParamVector& theta,
                             double eps = 0.0);

}  // namespace sgn
