#include "sgn/problems/quantreg.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sgn/stats.hpp"

namespace sgn {

QuantRegProblem::QuantRegProblem(Eigen::VectorXd y, Eigen::MatrixXd x, Eigen::MatrixXd w, double t,
                                 ParamBox box)
    : y_(std::move(y)), x_(std::move(x)), w_(std::move(w)), t_(t), box_(std::move(box)) {
  const Eigen::Index n = y_.size();
  if (n < 1) throw ContractError("QuantRegProblem: need at least one observation");
  if (x_.rows() != n || w_.rows() != n) throw ContractError("QuantRegProblem: row counts differ");
  if (x_.cols() < 1) throw ContractError("QuantRegProblem: need at least one regressor");
  if (w_.cols() < x_.cols()) throw ContractError("QuantRegProblem: need p >= d_theta instruments");
  if (box_.dim() != x_.cols()) throw ContractError("QuantRegProblem: box dimension mismatch");
  if (!(t > 0.0 && t < 1.0)) throw ContractError("QuantRegProblem: t must lie in (0, 1)");
  x_norm_ = x_.rowwise().norm();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(x_norm_[i] > 0.0))
      throw ContractError("QuantRegProblem: regressor row " + std::to_string(i) + " is zero");
}

QuantRegProblem QuantRegProblem::generate(std::size_t n, Eigen::Index d_theta,
                                          Eigen::Index extra_instruments, double t,
                                          std::uint64_t seed, double box_half_width) {
  if (d_theta < 1) throw ConfigError("quantreg: d_theta must be >= 1");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  const auto rows = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd x(rows, d_theta);
  Eigen::VectorXd beta = Eigen::VectorXd::Constant(d_theta, 0.5);
  beta[0] = 1.0;
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < d_theta; ++j) x(i, j) = normal(engine);
    y[i] = x.row(i).dot(beta) + normal(engine);
  }
  Eigen::MatrixXd w(rows, d_theta + extra_instruments);
  w.leftCols(d_theta) = x;
  for (Eigen::Index k = 0; k < extra_instruments; ++k) {
    const Eigen::Index src = d_theta > 1 ? 1 + k % (d_theta - 1) : 0;
    w.col(d_theta + k) = x.col(src).array().square();
  }
  return QuantRegProblem(std::move(y), std::move(x), std::move(w), t,
                         ParamBox::cube(d_theta, -box_half_width, box_half_width));
}

QuantRegProblem QuantRegProblem::read_csv(std::istream& in, Eigen::Index d_theta, double t,
                                          ParamBox box) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("quantreg csv: missing header");
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("quantreg csv: bad value '" + cell + "'");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError("quantreg csv: ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("quantreg csv: no data");
  const auto cols = static_cast<Eigen::Index>(rows.front().size());
  if (cols < 1 + 2 * d_theta) throw ConfigError("quantreg csv: too few columns");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = cols - 1 - d_theta;
  Eigen::VectorXd y(n);
  Eigen::MatrixXd x(n, d_theta);
  Eigen::MatrixXd w(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    y[i] = r[0];
    for (Eigen::Index j = 0; j < d_theta; ++j) x(i, j) = r[static_cast<std::size_t>(1 + j)];
    for (Eigen::Index k = 0; k < p; ++k) w(i, k) = r[static_cast<std::size_t>(1 + d_theta + k)];
  }
  return QuantRegProblem(std::move(y), std::move(x), std::move(w), t, std::move(box));
}

void QuantRegProblem::write_csv(std::ostream& out) const {
  const auto precision = out.precision(17);
  out << "y";
  for (Eigen::Index j = 0; j < x_.cols(); ++j) out << ",x_" << j;
  for (Eigen::Index k = 0; k < w_.cols(); ++k) out << ",w_" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    out << y_[i];
    for (Eigen::Index j = 0; j < x_.cols(); ++j) out << ',' << x_(i, j);
    for (Eigen::Index k = 0; k < w_.cols(); ++k) out << ',' << w_(i, k);
    out << '\n';
  }
  out.precision(precision);
}

MomentValue QuantRegProblem::eval(const ParamVector& theta) const {
  if (theta.size() != dim_theta()) throw ContractError("QuantRegProblem: theta has the wrong dimension");
  const Eigen::VectorXd resid = y_ - x_ * theta;
  MomentValue g = MomentValue::Zero(dim_moments());
  for (Eigen::Index i = 0; i < y_.size(); ++i)
    g += ((resid[i] > 0.0 ? 1.0 : 0.0) - t_) * w_.row(i).transpose();
  return g / static_cast<double>(y_.size());
}

namespace {

struct MomentJacobianSums {
  Eigen::VectorXd g;
  Eigen::MatrixXd jac;
  MomentJacobianSums& operator+=(const MomentJacobianSums& o) {
    g += o.g;
    jac += o.jac;
    return *this;
  }
};

}  // namespace

SmoothedEval QuantRegProblem::smoothed(const ParamVector& theta, double eps, Execution exec) const {
  if (theta.size() != dim_theta()) throw ContractError("QuantRegProblem: theta has the wrong dimension");
  if (!(eps > 0.0)) throw ContractError("QuantRegProblem: eps must be positive");
  const MomentJacobianSums zero{Eigen::VectorXd::Zero(dim_moments()),
                                Eigen::MatrixXd::Zero(dim_moments(), dim_theta())};
  const MomentJacobianSums sums = kernels::blocked_reduce(
      exec, static_cast<std::size_t>(y_.size()), zero,
      [&](std::size_t begin, std::size_t end, MomentJacobianSums& acc) {
        for (auto i = static_cast<Eigen::Index>(begin); i < static_cast<Eigen::Index>(end); ++i) {
          const double h = eps * x_norm_[i];
          const double z = (y_[i] - x_.row(i).dot(theta)) / h;
          acc.g += (normal_cdf(z) - t_) * w_.row(i).transpose();
          acc.jac.noalias() -= (normal_pdf(z) / x_norm_[i]) * w_.row(i).transpose() * x_.row(i);
        }
      });
  const double n = static_cast<double>(y_.size());
  return {sums.g / n, sums.jac / (n * eps)};
}

std::optional<SmoothedEval> QuantRegProblem::closed_form_smoothed(const ParamVector& theta,
                                                                  double eps) const {
  return smoothed(theta, eps);
}

}  // namespace sgn
