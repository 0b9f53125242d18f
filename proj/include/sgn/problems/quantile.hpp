#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sgn/kernels.hpp"
#include "sgn/moments.hpp"

namespace sgn {

/// Sample t-quantile as a just-identified moment problem: ḡ_n(θ) = F_n(θ) − t.
///
/// Convolution smoothing has a closed form here: the smoothed moment is the
/// kernel-smoothed CDF F_{n,ε}(θ) − t and the smoothed Jacobian is the Gaussian
/// kernel density estimate f_{n,ε}(θ).
class QuantileProblem final : public MomentProblem {
 public:
  QuantileProblem(std::vector<double> data, double t);
  QuantileProblem(std::vector<double> data, double t, ParamBox box);

  /// n iid N(0,1) draws.
  static QuantileProblem generate_normal(std::size_t n, double t, std::uint64_t seed);
  static QuantileProblem read_csv(std::istream& in, double t);
  void write_csv(std::ostream& out) const;

  Eigen::Index dim_theta() const override { return 1; }
  Eigen::Index dim_moments() const override { return 1; }
  Eigen::Index sample_size() const override { return static_cast<Eigen::Index>(sorted_.size()); }
  const ParamBox& box() const override { return box_; }
  MomentValue eval(const ParamVector& theta) const override;
  std::optional<SmoothedEval> closed_form_smoothed(const ParamVector& theta, double eps) const override;

  /// F_n(θ) − t.
  double moment(double theta) const;

  struct Smoothed {
    double gbar_eps;  // F_{n,ε}(θ) − t
    double f_eps;     // f_{n,ε}(θ)
  };
  Smoothed smoothed(double theta, double eps, Execution exec = Execution::Parallel) const;

  /// sqrt(t(1 − t)/n) / f_{n,ε}(θ̂).
  double std_err(double theta_hat, double eps) const;

  double t() const { return t_; }
  const std::vector<double>& data() const { return data_; }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> data_;
  std::vector<double> sorted_;
  double t_;
  ParamBox box_;
};

/// sqrt(t(1 − t)/n) / f.
double quantile_std_err(double t, Eigen::Index n, double f);

}  // namespace sgn
