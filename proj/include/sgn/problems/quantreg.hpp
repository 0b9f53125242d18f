#pragma once

#include <cstdint>
#include <iosfwd>

#include "sgn/kernels.hpp"
#include "sgn/moments.hpp"

namespace sgn {

/// Instrumented quantile-regression moments
///
///   ḡ_n(θ) = (1/n) Σ [1{y_i − x_i'θ > 0} − t] w_i,
///
/// whose zero is the (1 − t) conditional quantile. Smoothing uses the
/// individual bandwidth ε‖x_i‖₂:
///
///   ḡ_{n,ε}(θ) = (1/n) Σ [Φ((y_i − x_i'θ)/(ε‖x_i‖)) − t] w_i,
///   G_{n,ε}(θ) = −1/(nε) Σ w_i x_i'/‖x_i‖ φ((y_i − x_i'θ)/(ε‖x_i‖)).
class QuantRegProblem final : public MomentProblem {
 public:
  /// x is n × d_theta, w is n × p (p ≥ d_theta).
  QuantRegProblem(Eigen::VectorXd y, Eigen::MatrixXd x, Eigen::MatrixXd w, double t, ParamBox box);

  /// Intercept plus (d_theta − 1) N(0,1) regressors, instruments equal to the
  /// regressors plus `extra_instruments` squared regressor columns, y = x'β + N(0,1)
  /// with β = (1, 0.5, 0.5, ...).
  static QuantRegProblem generate(std::size_t n, Eigen::Index d_theta, Eigen::Index extra_instruments,
                                  double t, std::uint64_t seed, double box_half_width = 5.0);
  static QuantRegProblem read_csv(std::istream& in, Eigen::Index d_theta, double t, ParamBox box);
  void write_csv(std::ostream& out) const;

  Eigen::Index dim_theta() const override { return x_.cols(); }
  Eigen::Index dim_moments() const override { return w_.cols(); }
  Eigen::Index sample_size() const override { return y_.size(); }
  const ParamBox& box() const override { return box_; }
  MomentValue eval(const ParamVector& theta) const override;
  std::optional<SmoothedEval> closed_form_smoothed(const ParamVector& theta, double eps) const override;

  SmoothedEval smoothed(const ParamVector& theta, double eps, Execution exec = Execution::Parallel) const;

  double t() const { return t_; }
  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::MatrixXd& x() const { return x_; }
  const Eigen::MatrixXd& w() const { return w_; }

 private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd x_;
  Eigen::MatrixXd w_;
  Eigen::VectorXd x_norm_;
  double t_;
  ParamBox box_;
};

}  // namespace sgn
