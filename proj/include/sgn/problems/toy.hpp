#pragma once

#include "sgn/moments.hpp"

namespace sgn {

/// Affine moments ḡ(θ) = Aθ + b. Smoothing leaves them unchanged.
class LinearProblem final : public MomentProblem {
 public:
  LinearProblem(Eigen::MatrixXd a, Eigen::VectorXd b, ParamBox box, Eigen::Index n = 100);

  Eigen::Index dim_theta() const override { return a_.cols(); }
  Eigen::Index dim_moments() const override { return a_.rows(); }
  Eigen::Index sample_size() const override { return n_; }
  const ParamBox& box() const override { return box_; }
  MomentValue eval(const ParamVector& theta) const override;
  std::optional<SmoothedEval> closed_form_smoothed(const ParamVector& theta, double eps) const override;

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  ParamBox box_;
  Eigen::Index n_;
};

/// One parameter, two basins: ḡ(θ) = (θ² − 1, (θ − 1)/2) on [−3, 3].
///
/// The global minimizer is θ = 1 (ḡ = 0). Gauss-Newton started left of the
/// local maximum near −0.146 settles at the spurious local minimum near −0.854.
class TwoBasinProblem final : public MomentProblem {
 public:
  explicit TwoBasinProblem(ParamBox box = ParamBox::cube(1, -3.0, 3.0), Eigen::Index n = 100);

  Eigen::Index dim_theta() const override { return 1; }
  Eigen::Index dim_moments() const override { return 2; }
  Eigen::Index sample_size() const override { return n_; }
  const ParamBox& box() const override { return box_; }
  MomentValue eval(const ParamVector& theta) const override;
  std::optional<SmoothedEval> closed_form_smoothed(const ParamVector& theta, double eps) const override;

 private:
  ParamBox box_;
  Eigen::Index n_;
};

/// Smooth square system ḡ(θ) = A(θ − θ̂) + c (sin θ − sin θ̂) with root θ̂.
/// Its convolution smoothing scales the sine terms by exp(−ε²/2).
class SmoothSystemProblem final : public MomentProblem {
 public:
  SmoothSystemProblem(Eigen::MatrixXd a, Eigen::VectorXd root, double c, ParamBox box,
                      Eigen::Index n = 100);
  /// 3-parameter instance with a well-conditioned A and c = 0.1 on [−3, 3]³.
  static SmoothSystemProblem standard();

  Eigen::Index dim_theta() const override { return a_.cols(); }
  Eigen::Index dim_moments() const override { return a_.rows(); }
  Eigen::Index sample_size() const override { return n_; }
  const ParamBox& box() const override { return box_; }
  MomentValue eval(const ParamVector& theta) const override;
  std::optional<SmoothedEval> closed_form_smoothed(const ParamVector& theta, double eps) const override;

  const ParamVector& root() const { return root_; }

 private:
  Eigen::MatrixXd a_;
  ParamVector root_;
  double c_;
  ParamBox box_;
  Eigen::Index n_;
};

}  // namespace sgn
