#pragma once

#include <initializer_list>
#include <random>

#include "sgn/moments.hpp"

namespace sgn::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = nd(rng);
  return m;
}

/// ḡ(θ) = c for every θ.
class ConstantProblem final : public MomentProblem {
 public:
  ConstantProblem(Eigen::VectorXd c, Eigen::Index d)
      : c_(std::move(c)), box_(ParamBox::cube(d, -10, 10)) {}
  Eigen::Index dim_theta() const override { return box_.dim(); }
  Eigen::Index dim_moments() const override { return c_.size(); }
  Eigen::Index sample_size() const override { return 100; }
  const ParamBox& box() const override { return box_; }
  MomentValue eval(const ParamVector&) const override { return c_; }

 private:
  Eigen::VectorXd c_;
  ParamBox box_;
};

/// c · ḡ(θ) for a wrapped problem.
class ScaledProblem final : public MomentProblem {
 public:
  ScaledProblem(const MomentProblem& base, double c) : base_(base), c_(c) {}
  Eigen::Index dim_theta() const override { return base_.dim_theta(); }
  Eigen::Index dim_moments() const override { return base_.dim_moments(); }
  Eigen::Index sample_size() const override { return base_.sample_size(); }
  const ParamBox& box() const override { return base_.box(); }
  MomentValue eval(const ParamVector& theta) const override { return c_ * base_.eval(theta); }

 private:
  const MomentProblem& base_;
  double c_;
};

/// Counts evaluations of a wrapped problem (single-threaded use only).
class CountingProblem final : public MomentProblem {
 public:
  explicit CountingProblem(const MomentProblem& base) : base_(base) {}
  Eigen::Index dim_theta() const override { return base_.dim_theta(); }
  Eigen::Index dim_moments() const override { return base_.dim_moments(); }
  Eigen::Index sample_size() const override { return base_.sample_size(); }
  const ParamBox& box() const override { return base_.box(); }
  MomentValue eval(const ParamVector& theta) const override {
    ++count;
    return base_.eval(theta);
  }
  std::optional<SmoothedEval> closed_form_smoothed(const ParamVector& theta, double eps) const override {
    return base_.closed_form_smoothed(theta, eps);
  }
  mutable long count = 0;

 private:
  const MomentProblem& base_;
};

}  // namespace sgn::testing
