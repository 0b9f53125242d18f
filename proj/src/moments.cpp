#include "sgn/moments.hpp"

#include <cmath>
#include <string>

namespace sgn {

namespace {

constexpr double kPivotTol = 1e-10;

}  // namespace

ParamBox::ParamBox(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() < 1) throw ContractError("ParamBox: dimension must be at least 1");
  if (lower_.size() != upper_.size()) throw ContractError("ParamBox: bound dimensions differ");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || !(lower_[i] < upper_[i]))
      throw ContractError("ParamBox: need finite lower < upper in coordinate " + std::to_string(i));
  }
}

ParamBox ParamBox::cube(Eigen::Index dim, double lo, double hi) {
  return ParamBox(Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi));
}

bool ParamBox::contains(const ParamVector& theta) const {
  if (theta.size() != dim()) return false;
  return ((theta.array() >= lower_.array()) && (theta.array() <= upper_.array())).all();
}

ParamVector ParamBox::from_unit(const Eigen::VectorXd& u) const {
  if (u.size() != dim()) throw ContractError("ParamBox::from_unit: dimension mismatch");
  ParamVector theta = lower_.array() + u.array() * width().array();
  // guard against rounding past the upper face
  return theta.cwiseMax(lower_).cwiseMin(upper_);
}

WeightMatrix::WeightMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols())
    throw ContractError("WeightMatrix: must be square and nonempty");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ContractError("WeightMatrix: not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(entries_);
  if (llt.info() != Eigen::Success)
    throw ContractError("WeightMatrix: not positive definite");
  chol_lower_ = llt.matrixL();
  for (Eigen::Index i = 0; i < chol_lower_.rows(); ++i) {
    const double pivot = chol_lower_(i, i) * chol_lower_(i, i);
    if (!(pivot > kPivotTol)) throw ContractError("WeightMatrix: not strictly positive definite");
  }
}

WeightMatrix WeightMatrix::identity(Eigen::Index p) {
  return WeightMatrix(Eigen::MatrixXd::Identity(p, p));
}

WeightMatrix WeightMatrix::scaled(double c) const {
  if (!(c > 0)) throw ContractError("WeightMatrix::scaled: factor must be positive");
  return WeightMatrix(c * entries_);
}

double weighted_norm(const MomentValue& v, const WeightMatrix& w) {
  if (v.size() != w.dim())
    throw ContractError("weighted_norm: moment dimension " + std::to_string(v.size()) +
                        " does not match weight dimension " + std::to_string(w.dim()));
  const double q = v.dot(w.entries() * v);
  return std::sqrt(std::max(0.0, q));
}

double objective(const MomentProblem& problem, const ParamVector& theta, const WeightMatrix& w) {
  require_finite(theta, "objective: theta");
  const double norm = weighted_norm(problem.eval(theta), w);
  return norm * norm;
}

ParamVector clamp_to_box(const ParamVector& theta, const ParamBox& box) {
  if (theta.size() != box.dim()) throw ContractError("clamp_to_box: dimension mismatch");
  return theta.cwiseMax(box.lower()).cwiseMin(box.upper());
}

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw ContractError(std::string(what) + " has non-finite entries");
}

}  // namespace sgn
