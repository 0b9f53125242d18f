#pragma once

#include <cstdint>
#include <vector>

#include "sgn/moments.hpp"

namespace sgn {

enum class QnEstimator {
  LeastSquares,  // regression of Y on de-meaned directions (default)
  SampleMean,    // (1/L) Σ Y_ℓ Z_ℓ'
};

/// Default window length max(25, ceil(1.5 d_theta)).
int default_qn_window(Eigen::Index dim_theta);

/// Smallest number of pairs the estimator can work with.
int min_qn_window(Eigen::Index dim_theta, QnEstimator estimator);

/// Rolling window of L (direction, scaled moment difference) pairs,
///
///   Y_ℓ = [ḡ_n(θ_ℓ + εZ_ℓ) − ḡ_n(θ_ℓ)] / ε,
///
/// backing the quasi-Newton approximation of the smoothed Jacobian. New pairs
/// evict the oldest ones (FIFO). Pairs created before a global jump are kept.
class QnBuffer {
 public:
  struct Pair {
    Eigen::VectorXd z;
    Eigen::VectorXd y;
  };

  /// Fill the window with L pairs generated at θ0.
  static QnBuffer init(const MomentProblem& problem, const ParamVector& theta0, double eps, int L,
                       std::uint64_t seed, QnEstimator estimator = QnEstimator::LeastSquares);
  static QnBuffer init(const MomentProblem& problem, const ParamVector& theta0,
                       const MomentValue& moments_at_theta0, double eps, int L,
                       std::uint64_t seed, QnEstimator estimator = QnEstimator::LeastSquares);

  /// Buffer over explicit pairs, oldest first. Used for checks against hand computations.
  static QnBuffer from_pairs(std::vector<Pair> pairs, double eps,
                             QnEstimator estimator = QnEstimator::LeastSquares);

  /// Draw `directions` fresh Z at θ, compute their Y and evict as many of the oldest pairs.
  void update(const MomentProblem& problem, const ParamVector& theta,
              const MomentValue& moments_at_theta, int directions = 1);

  /// Estimate selected at construction.
  Jacobian estimate() const;
  /// Σ Y Z̃' (Σ Z̃ Z̃')⁻¹ with Z̃ the de-meaned directions. Throws RankDeficientError.
  Jacobian least_squares() const;
  Jacobian sample_mean() const;

  int capacity() const { return static_cast<int>(pairs_.size()); }
  double eps() const { return eps_; }
  QnEstimator estimator() const { return estimator_; }
  /// Pairs in insertion order, oldest first.
  std::vector<Pair> pairs() const;
  /// Number of directions drawn after initialization.
  std::uint64_t updates() const { return draw_counter_; }

 private:
  QnBuffer(std::vector<Pair> pairs, double eps, std::uint64_t seed, QnEstimator estimator);

  std::vector<Pair> pairs_;  // ring buffer
  std::size_t oldest_ = 0;
  double eps_;
  std::uint64_t seed_;
  std::uint64_t draw_counter_ = 0;
  QnEstimator estimator_;
};

/// One quasi-Newton iteration: update the window at θ_b and return the estimate.
Jacobian qn_update_jacobian(QnBuffer& buffer, const MomentProblem& problem,
                            const ParamVector& theta, const MomentValue& moments_at_theta,
                            int directions = 1);

}  // namespace sgn
