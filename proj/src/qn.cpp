#include "sgn/qn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgn/rng.hpp"

namespace sgn {

namespace {

constexpr double kRankTol = 1e-10;

QnBuffer::Pair make_pair(const MomentProblem& problem, const ParamVector& theta,
                         const MomentValue& g, double eps, Eigen::VectorXd z) {
  Eigen::VectorXd y = (problem.eval(theta + eps * z) - g) / eps;
  return {std::move(z), std::move(y)};
}

}  // namespace

int default_qn_window(Eigen::Index dim_theta) {
  return std::max(25, static_cast<int>(std::ceil(1.5 * static_cast<double>(dim_theta))));
}

int min_qn_window(Eigen::Index dim_theta, QnEstimator estimator) {
  // De-meaning removes one degree of freedom from the design.
  return static_cast<int>(dim_theta) + (estimator == QnEstimator::LeastSquares ? 1 : 0);
}

QnBuffer::QnBuffer(std::vector<Pair> pairs, double eps, std::uint64_t seed, QnEstimator estimator)
    : pairs_(std::move(pairs)), eps_(eps), seed_(seed), estimator_(estimator) {}

QnBuffer QnBuffer::init(const MomentProblem& problem, const ParamVector& theta0, double eps,
                        int L, std::uint64_t seed, QnEstimator estimator) {
  return init(problem, theta0, problem.eval(theta0), eps, L, seed, estimator);
}

QnBuffer QnBuffer::init(const MomentProblem& problem, const ParamVector& theta0,
                        const MomentValue& moments_at_theta0, double eps, int L,
                        std::uint64_t seed, QnEstimator estimator) {
  const Eigen::Index d = problem.dim_theta();
  if (theta0.size() != d) throw ContractError("qn_init: theta has the wrong dimension");
  if (!(eps > 0.0)) throw ConfigError("qn_init: eps must be positive");
  if (L < min_qn_window(d, estimator))
    throw ConfigError("qn_init: window L=" + std::to_string(L) + " too small for d_theta=" +
                      std::to_string(d));
  NormalStream stream(derive_seed(seed, {tag(StreamTag::kQnInit)}));
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l)
    pairs.push_back(make_pair(problem, theta0, moments_at_theta0, eps, stream.vector(d)));
  return QnBuffer(std::move(pairs), eps, seed, estimator);
}

QnBuffer QnBuffer::from_pairs(std::vector<Pair> pairs, double eps, QnEstimator estimator) {
  if (pairs.empty()) throw ContractError("QnBuffer::from_pairs: no pairs");
  for (const auto& p : pairs) {
    if (p.z.size() != pairs.front().z.size() || p.y.size() != pairs.front().y.size())
      throw ContractError("QnBuffer::from_pairs: inconsistent pair dimensions");
  }
  return QnBuffer(std::move(pairs), eps, 0, estimator);
}

void QnBuffer::update(const MomentProblem& problem, const ParamVector& theta,
                      const MomentValue& moments_at_theta, int directions) {
  if (directions < 1) throw ConfigError("qn update: directions_per_iter must be >= 1");
  const Eigen::Index d = problem.dim_theta();
  for (int k = 0; k < directions; ++k) {
    NormalStream stream(derive_seed(seed_, {tag(StreamTag::kQnUpdate), draw_counter_++}));
    pairs_[oldest_] = make_pair(problem, theta, moments_at_theta, eps_, stream.vector(d));
    oldest_ = (oldest_ + 1) % pairs_.size();
  }
}

Jacobian QnBuffer::estimate() const {
  return estimator_ == QnEstimator::LeastSquares ? least_squares() : sample_mean();
}

Jacobian QnBuffer::least_squares() const {
  const auto L = static_cast<Eigen::Index>(pairs_.size());
  const Eigen::Index d = pairs_.front().z.size();
  const Eigen::Index p = pairs_.front().y.size();
  Eigen::MatrixXd z(L, d);
  Eigen::MatrixXd y(L, p);
  for (Eigen::Index l = 0; l < L; ++l) {
    z.row(l) = pairs_[static_cast<std::size_t>(l)].z.transpose();
    y.row(l) = pairs_[static_cast<std::size_t>(l)].y.transpose();
  }
  z.rowwise() -= z.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() < d || sv[d - 1] < kRankTol)
    throw RankDeficientError("quasi-Newton: de-meaned direction matrix is rank deficient");
  return svd.solve(y).transpose();
}

Jacobian QnBuffer::sample_mean() const {
  const Eigen::Index d = pairs_.front().z.size();
  const Eigen::Index p = pairs_.front().y.size();
  Jacobian g = Jacobian::Zero(p, d);
  for (const auto& pair : pairs_) g.noalias() += pair.y * pair.z.transpose();
  return g / static_cast<double>(pairs_.size());
}

std::vector<QnBuffer::Pair> QnBuffer::pairs() const {
  std::vector<Pair> out;
  out.reserve(pairs_.size());
  for (std::size_t k = 0; k < pairs_.size(); ++k) out.push_back(pairs_[(oldest_ + k) % pairs_.size()]);
  return out;
}

Jacobian qn_update_jacobian(QnBuffer& buffer, const MomentProblem& problem,
                            const ParamVector& theta, const MomentValue& moments_at_theta,
                            int directions) {
  buffer.update(problem, theta, moments_at_theta, directions);
  return buffer.estimate();
}

}  // namespace sgn
