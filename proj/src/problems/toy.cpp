#include "sgn/problems/toy.hpp"

#include <cmath>

namespace sgn {

LinearProblem::LinearProblem(Eigen::MatrixXd a, Eigen::VectorXd b, ParamBox box, Eigen::Index n)
    : a_(std::move(a)), b_(std::move(b)), box_(std::move(box)), n_(n) {
  if (a_.rows() != b_.size()) throw ContractError("LinearProblem: A and b disagree on p");
  if (a_.cols() != box_.dim()) throw ContractError("LinearProblem: box dimension mismatch");
  if (n_ < 1) throw ContractError("LinearProblem: n must be >= 1");
}

MomentValue LinearProblem::eval(const ParamVector& theta) const {
  if (theta.size() != a_.cols()) throw ContractError("LinearProblem: theta has the wrong dimension");
  return a_ * theta + b_;
}

std::optional<SmoothedEval> LinearProblem::closed_form_smoothed(const ParamVector& theta, double) const {
  return SmoothedEval{eval(theta), a_};
}

TwoBasinProblem::TwoBasinProblem(ParamBox box, Eigen::Index n) : box_(std::move(box)), n_(n) {
  if (box_.dim() != 1) throw ContractError("TwoBasinProblem: box must be one-dimensional");
}

MomentValue TwoBasinProblem::eval(const ParamVector& theta) const {
  if (theta.size() != 1) throw ContractError("TwoBasinProblem: theta must be scalar");
  const double t = theta[0];
  return Eigen::Vector2d(t * t - 1.0, 0.5 * (t - 1.0));
}

std::optional<SmoothedEval> TwoBasinProblem::closed_form_smoothed(const ParamVector& theta,
                                                                  double eps) const {
  if (theta.size() != 1) throw ContractError("TwoBasinProblem: theta must be scalar");
  const double t = theta[0];
  SmoothedEval out{Eigen::Vector2d(t * t + eps * eps - 1.0, 0.5 * (t - 1.0)), Jacobian(2, 1)};
  out.jacobian << 2.0 * t, 0.5;
  return out;
}

SmoothSystemProblem::SmoothSystemProblem(Eigen::MatrixXd a, Eigen::VectorXd root, double c,
                                         ParamBox box, Eigen::Index n)
    : a_(std::move(a)), root_(std::move(root)), c_(c), box_(std::move(box)), n_(n) {
  if (a_.rows() != a_.cols() || a_.cols() != root_.size() || root_.size() != box_.dim())
    throw ContractError("SmoothSystemProblem: dimension mismatch");
}

SmoothSystemProblem SmoothSystemProblem::standard() {
  Eigen::Matrix3d a;
  a << 2.0, 0.3, -0.2,
       0.1, 1.5, 0.4,
       -0.3, 0.2, 1.8;
  return SmoothSystemProblem(a, Eigen::Vector3d(0.5, -1.0, 1.5), 0.1, ParamBox::cube(3, -3.0, 3.0));
}

MomentValue SmoothSystemProblem::eval(const ParamVector& theta) const {
  if (theta.size() != root_.size()) throw ContractError("SmoothSystemProblem: theta has the wrong dimension");
  return a_ * (theta - root_) + c_ * (theta.array().sin() - root_.array().sin()).matrix();
}

std::optional<SmoothedEval> SmoothSystemProblem::closed_form_smoothed(const ParamVector& theta,
                                                                      double eps) const {
  if (theta.size() != root_.size()) throw ContractError("SmoothSystemProblem: theta has the wrong dimension");
  // E[sin(θ + εZ)] = exp(−ε²/2) sin θ
  const double damp = std::exp(-0.5 * eps * eps);
  SmoothedEval out;
  out.moments = a_ * (theta - root_) + c_ * (damp * theta.array().sin() - root_.array().sin()).matrix();
  out.jacobian = a_;
  out.jacobian.diagonal().array() += c_ * damp * theta.array().cos();
  return out;
}

}  // namespace sgn
