#include "sgn/problems/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <string>

#include "sgn/stats.hpp"

namespace sgn {

namespace {

ParamBox default_box(const std::vector<double>& data) {
  if (data.empty()) throw ContractError("QuantileProblem: need at least one observation");
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  return ParamBox(Eigen::VectorXd::Constant(1, *lo - 1.0), Eigen::VectorXd::Constant(1, *hi + 1.0));
}

struct CdfPdfSums {
  double cdf = 0.0;
  double pdf = 0.0;
  CdfPdfSums& operator+=(const CdfPdfSums& o) {
    cdf += o.cdf;
    pdf += o.pdf;
    return *this;
  }
};

}  // namespace

QuantileProblem::QuantileProblem(std::vector<double> data, double t)
    : QuantileProblem(data, t, default_box(data)) {}

QuantileProblem::QuantileProblem(std::vector<double> data, double t, ParamBox box)
    : data_(std::move(data)), sorted_(data_), t_(t), box_(std::move(box)) {
  if (data_.empty()) throw ContractError("QuantileProblem: need at least one observation");
  if (!(t > 0.0 && t < 1.0)) throw ContractError("QuantileProblem: t must lie in (0, 1)");
  if (box_.dim() != 1) throw ContractError("QuantileProblem: box must be one-dimensional");
  for (double x : data_)
    if (!std::isfinite(x)) throw ContractError("QuantileProblem: data must be finite");
  std::sort(sorted_.begin(), sorted_.end());
}

QuantileProblem QuantileProblem::generate_normal(std::size_t n, double t, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  std::vector<double> data(n);
  for (auto& x : data) x = normal(engine);
  return QuantileProblem(std::move(data), t);
}

QuantileProblem QuantileProblem::read_csv(std::istream& in, double t) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("x", 0) != 0)
    throw ConfigError("quantile csv: expected header 'x'");
  std::vector<double> data;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      data.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw ConfigError("quantile csv: bad value '" + line + "'");
    }
  }
  return QuantileProblem(std::move(data), t);
}

void QuantileProblem::write_csv(std::ostream& out) const {
  const auto precision = out.precision(17);
  out << "x\n";
  for (double x : data_) out << x << '\n';
  out.precision(precision);
}

double QuantileProblem::moment(double theta) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), theta) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size()) - t_;
}

MomentValue QuantileProblem::eval(const ParamVector& theta) const {
  if (theta.size() != 1) throw ContractError("QuantileProblem: theta must be scalar");
  return MomentValue::Constant(1, moment(theta[0]));
}

QuantileProblem::Smoothed QuantileProblem::smoothed(double theta, double eps, Execution exec) const {
  if (!(eps > 0.0)) throw ContractError("QuantileProblem: eps must be positive");
  const double inv_eps = 1.0 / eps;
  const CdfPdfSums sums = kernels::blocked_reduce(
      exec, data_.size(), CdfPdfSums{}, [&](std::size_t begin, std::size_t end, CdfPdfSums& acc) {
        for (std::size_t i = begin; i < end; ++i) {
          const double z = (theta - data_[i]) * inv_eps;
          acc.cdf += normal_cdf(z);
          acc.pdf += normal_pdf(z);
        }
      });
  const double n = static_cast<double>(data_.size());
  return {sums.cdf / n - t_, sums.pdf / (n * eps)};
}

std::optional<SmoothedEval> QuantileProblem::closed_form_smoothed(const ParamVector& theta,
                                                                  double eps) const {
  if (theta.size() != 1) throw ContractError("QuantileProblem: theta must be scalar");
  const Smoothed s = smoothed(theta[0], eps);
  return SmoothedEval{MomentValue::Constant(1, s.gbar_eps), Jacobian::Constant(1, 1, s.f_eps)};
}

double QuantileProblem::std_err(double theta_hat, double eps) const {
  return quantile_std_err(t_, sample_size(), smoothed(theta_hat, eps).f_eps);
}

double quantile_std_err(double t, Eigen::Index n, double f) {
  if (n < 1) throw ContractError("quantile_std_err: n must be >= 1");
  if (!(f > 0.0)) throw ContractError("quantile_std_err: density must be positive");
  return std::sqrt(t * (1.0 - t) / static_cast<double>(n)) / f;
}

}  // namespace sgn
