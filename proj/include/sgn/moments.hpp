#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "sgn/errors.hpp"

namespace sgn {

using ParamVector = Eigen::VectorXd;   // θ, length d_theta
using MomentValue = Eigen::VectorXd;   // ḡ_n(θ), length p
using Jacobian = Eigen::MatrixXd;      // p × d_theta

/// Axis-aligned parameter box Θ = [lower_1, upper_1] × ... × [lower_d, upper_d].
class ParamBox {
 public:
  ParamBox(Eigen::VectorXd lower, Eigen::VectorXd upper);

  /// The cube [lo, hi]^dim.
  static ParamBox cube(Eigen::Index dim, double lo, double hi);

  Eigen::Index dim() const { return lower_.size(); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::VectorXd width() const { return upper_ - lower_; }
  Eigen::VectorXd center() const { return 0.5 * (lower_ + upper_); }

  bool contains(const ParamVector& theta) const;
  /// Affine map from the unit cube onto the box.
  ParamVector from_unit(const Eigen::VectorXd& u) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Symmetric, strictly positive definite weighting matrix W_n.
class WeightMatrix {
 public:
  explicit WeightMatrix(Eigen::MatrixXd entries);
  static WeightMatrix identity(Eigen::Index p);

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  /// Lower Cholesky factor L with W = L Lᵀ.
  const Eigen::MatrixXd& cholesky_lower() const { return chol_lower_; }

  /// W scaled by c > 0.
  WeightMatrix scaled(double c) const;

 private:
  Eigen::MatrixXd entries_;
  Eigen::MatrixXd chol_lower_;
};

/// Smoothed moments ḡ_{n,ε}(θ) and their Jacobian G_{n,ε}(θ).
struct SmoothedEval {
  MomentValue moments;
  Jacobian jacobian;
};

/// A moment-condition estimation problem.
///
/// Implementations are immutable after construction. `eval` must be a pure
/// function of θ (simulation draws frozen at construction) and callable from
/// several threads at once.
class MomentProblem {
 public:
  virtual ~MomentProblem() = default;

  virtual Eigen::Index dim_theta() const = 0;
  virtual Eigen::Index dim_moments() const = 0;
  /// Sample size n used by the χ² stopping threshold and default bandwidth.
  virtual Eigen::Index sample_size() const = 0;
  virtual const ParamBox& box() const = 0;

  /// ḡ_n(θ). Throws EvaluationError when the model cannot produce moments.
  virtual MomentValue eval(const ParamVector& theta) const = 0;

  /// Closed-form (ḡ_{n,ε}(θ), G_{n,ε}(θ)) when the problem has one.
  virtual std::optional<SmoothedEval> closed_form_smoothed(const ParamVector& theta,
                                                           double eps) const {
    (void)theta;
    (void)eps;
    return std::nullopt;
  }

  /// Problem-specific smoothed moments without a closed-form Jacobian (for
  /// example a simulator with a smoothed indicator). Used by the smoothed-GMM
  /// baseline when `closed_form_smoothed` is unavailable. The returned problem
  /// may refer to `*this` and must not outlive it.
  virtual std::unique_ptr<MomentProblem> smoothed_surrogate(double eps) const {
    (void)eps;
    return nullptr;
  }
};

/// sqrt(v' W v).
double weighted_norm(const MomentValue& v, const WeightMatrix& w);

/// ‖ḡ_n(θ)‖²_W.
double objective(const MomentProblem& problem, const ParamVector& theta, const WeightMatrix& w);

ParamVector clamp_to_box(const ParamVector& theta, const ParamBox& box);

/// Throws ContractError unless every entry is finite.
void require_finite(const Eigen::VectorXd& v, const char* what);

}  // namespace sgn
