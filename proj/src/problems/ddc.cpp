#include "sgn/problems/ddc.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sgn/stats.hpp"

namespace sgn {

namespace {

constexpr std::size_t kIndividualsPerBlock = 16;

struct OlsSums {
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xty;
  OlsSums& operator+=(const OlsSums& o) {
    xtx += o.xtx;
    xty += o.xty;
    return *this;
  }
};

void check_design(const DdcDesign& d) {
  if (d.n < 1 || d.T < 1 || d.beta_dim < 1)
    throw ContractError("DdcProblem: n, T and beta_dim must be >= 1");
}

double link(double index, double eps) {
  if (eps == 0.0) return index > 0.0 ? 1.0 : 0.0;
  return normal_cdf(index / eps);
}

/// Fill `out` (length T+1) with individual i's outcomes for periods 0..T.
void simulate_individual(const DdcDesign& design, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& shocks, const ParamVector& theta, double eps,
                         Eigen::Index i, Eigen::VectorXd& out) {
  const Eigen::Index bd = design.beta_dim;
  const double rho = theta[bd];
  out.noalias() = x.middleRows(i * (design.T + 1), design.T + 1) * theta.head(bd);
  for (Eigen::Index t = 0; t <= design.T; ++t)
    out[t] = link(out[t] + shocks(i, t + 1) + rho * shocks(i, t), eps);
}

/// Pooled Gram sums over periods 1..T; `outcomes(i, y)` fills periods 0..T.
template <class Outcomes>
OlsSums accumulate(const DdcDesign& design, const Eigen::MatrixXd& x, Execution exec,
                   Outcomes&& outcomes) {
  const Eigen::Index bd = design.beta_dim;
  const Eigen::Index k = bd + 2;
  const Eigen::Index T = design.T;
  const OlsSums zero{Eigen::MatrixXd::Zero(k, k), Eigen::VectorXd::Zero(k)};
  return kernels::blocked_reduce(
      exec, static_cast<std::size_t>(design.n), zero,
      [&](std::size_t begin, std::size_t end, OlsSums& acc) {
        const auto b0 = static_cast<Eigen::Index>(begin);
        const auto rows = static_cast<Eigen::Index>(end - begin) * T;
        Eigen::MatrixXd design_rows(rows, k);
        Eigen::VectorXd response(rows);
        Eigen::VectorXd yi(T + 1);
        for (auto i = b0; i < static_cast<Eigen::Index>(end); ++i) {
          outcomes(i, yi);
          for (Eigen::Index t = 1; t <= T; ++t) {
            const Eigen::Index r = (i - b0) * T + (t - 1);
            design_rows.row(r).head(bd) = x.row(i * (T + 1) + t);
            design_rows(r, bd) = yi[t - 1];
            design_rows(r, bd + 1) = 1.0;
            response[r] = yi[t];
          }
        }
        acc.xtx.noalias() += design_rows.transpose() * design_rows;
        acc.xty.noalias() += design_rows.transpose() * response;
      },
      kIndividualsPerBlock);
}

Eigen::VectorXd solve_ols(const OlsSums& sums) {
  Eigen::LLT<Eigen::MatrixXd> llt(sums.xtx);
  if (llt.info() != Eigen::Success) throw EvaluationError("DDC: singular OLS design");
  const Eigen::MatrixXd l = llt.matrixL();
  const double scale = sums.xtx.diagonal().maxCoeff();
  for (Eigen::Index j = 0; j < l.rows(); ++j)
    if (!(l(j, j) * l(j, j) > 1e-12 * scale)) throw EvaluationError("DDC: singular OLS design");
  return llt.solve(sums.xty);
}

}  // namespace

ParamVector ddc_true_params(Eigen::Index beta_dim) {
  if (beta_dim < 1) throw ContractError("ddc_true_params: beta_dim must be >= 1");
  ParamVector theta = ParamVector::Zero(beta_dim + 1);
  const Eigen::Index active = std::min<Eigen::Index>(5, beta_dim);
  theta.head(active).setConstant(1.0 / std::sqrt(5.0));
  theta[beta_dim] = 0.7;
  return theta;
}

ParamBox ddc_default_box(Eigen::Index beta_dim) {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(beta_dim + 1, -2.0);
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(beta_dim + 1, 2.0);
  lo[beta_dim] = -1.0;
  hi[beta_dim] = 1.0;
  return ParamBox(lo, hi);
}

Eigen::MatrixXd ddc_draw_shocks(const DdcDesign& design, std::uint64_t seed) {
  check_design(design);
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd e(design.n, design.T + 2);
  for (Eigen::Index i = 0; i < design.n; ++i)
    for (Eigen::Index c = 0; c < design.T + 2; ++c) e(i, c) = normal(engine);
  return e;
}

Eigen::VectorXd ddc_simulate(const DdcDesign& design, const Eigen::MatrixXd& x,
                             const Eigen::MatrixXd& shocks, const ParamVector& theta, double eps) {
  check_design(design);
  if (theta.size() != design.beta_dim + 1) throw ContractError("ddc_simulate: theta has the wrong dimension");
  Eigen::VectorXd y(design.n * (design.T + 1));
  Eigen::VectorXd yi(design.T + 1);
  for (Eigen::Index i = 0; i < design.n; ++i) {
    simulate_individual(design, x, shocks, theta, eps, i, yi);
    y.segment(i * (design.T + 1), design.T + 1) = yi;
  }
  return y;
}

Eigen::VectorXd ddc_panel_ols(const DdcDesign& design, const Eigen::MatrixXd& x,
                              const Eigen::VectorXd& y, Execution exec) {
  check_design(design);
  const Eigen::Index T = design.T;
  return solve_ols(accumulate(design, x, exec, [&](Eigen::Index i, Eigen::VectorXd& yi) {
    yi = y.segment(i * (T + 1), T + 1);
  }));
}

DdcProblem::DdcProblem(DdcDesign design, Eigen::MatrixXd x, Eigen::VectorXd y,
                       std::uint64_t sim_seed, ParamBox box)
    : DdcProblem(design, std::move(x), std::move(y), ddc_draw_shocks(design, sim_seed),
                 std::move(box)) {}

DdcProblem::DdcProblem(DdcDesign design, Eigen::MatrixXd x, Eigen::VectorXd y,
                       Eigen::MatrixXd shocks, ParamBox box)
    : design_(design), x_(std::move(x)), y_(std::move(y)), shocks_(std::move(shocks)),
      box_(std::move(box)) {
  check_design(design_);
  const Eigen::Index rows = design_.n * (design_.T + 1);
  if (x_.rows() != rows || x_.cols() != design_.beta_dim)
    throw ContractError("DdcProblem: regressor panel has the wrong shape");
  if (y_.size() != rows) throw ContractError("DdcProblem: outcome panel has the wrong length");
  if (shocks_.rows() != design_.n || shocks_.cols() != design_.T + 2)
    throw ContractError("DdcProblem: shock matrix has the wrong shape");
  if (box_.dim() != dim_theta()) throw ContractError("DdcProblem: box dimension mismatch");
  observed_ols_ = ddc_panel_ols(design_, x_, y_);
}

DdcProblem DdcProblem::generate(DdcDesign design, const ParamVector& theta_dagger,
                                std::uint64_t data_seed, std::uint64_t sim_seed, ParamBox box) {
  check_design(design);
  std::mt19937_64 engine(data_seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(design.n * (design.T + 1), design.beta_dim);
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(r, j) = normal(engine);
  const Eigen::MatrixXd data_shocks = ddc_draw_shocks(design, engine());
  Eigen::VectorXd y = ddc_simulate(design, x, data_shocks, theta_dagger);
  return DdcProblem(design, std::move(x), std::move(y), sim_seed, std::move(box));
}

DdcProblem DdcProblem::generate(DdcDesign design, std::uint64_t data_seed, std::uint64_t sim_seed) {
  return generate(design, ddc_true_params(design.beta_dim), data_seed, sim_seed,
                  ddc_default_box(design.beta_dim));
}

DdcProblem DdcProblem::read_csv(std::istream& in, std::uint64_t sim_seed, ParamBox box) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("i,t,y", 0) != 0)
    throw ConfigError("ddc csv: expected header 'i,t,y,x_0,...'");
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
        throw ConfigError("ddc csv: bad value '" + cell + "'");
      }
    }
    if (row.size() < 4 || (!rows.empty() && row.size() != rows.front().size()))
      throw ConfigError("ddc csv: malformed row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("ddc csv: no data");
  DdcDesign design;
  design.beta_dim = static_cast<Eigen::Index>(rows.front().size()) - 3;
  design.T = static_cast<Eigen::Index>(rows.back()[1]);
  design.n = static_cast<Eigen::Index>(rows.back()[0]) + 1;
  if (static_cast<Eigen::Index>(rows.size()) != design.n * (design.T + 1))
    throw ConfigError("ddc csv: row count does not match a balanced panel");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), design.beta_dim);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    if (static_cast<Eigen::Index>(rows[r][0]) != ri / (design.T + 1) ||
        static_cast<Eigen::Index>(rows[r][1]) != ri % (design.T + 1))
      throw ConfigError("ddc csv: rows must be sorted by individual then period");
    y[ri] = rows[r][2];
    for (Eigen::Index j = 0; j < design.beta_dim; ++j) x(ri, j) = rows[r][static_cast<std::size_t>(3 + j)];
  }
  return DdcProblem(design, std::move(x), std::move(y), sim_seed, std::move(box));
}

void DdcProblem::write_csv(std::ostream& out) const {
  const auto precision = out.precision(17);
  out << "i,t,y";
  for (Eigen::Index j = 0; j < design_.beta_dim; ++j) out << ",x_" << j;
  out << '\n';
  for (Eigen::Index r = 0; r < x_.rows(); ++r) {
    out << r / (design_.T + 1) << ',' << r % (design_.T + 1) << ',' << y_[r];
    for (Eigen::Index j = 0; j < design_.beta_dim; ++j) out << ',' << x_(r, j);
    out << '\n';
  }
  out.precision(precision);
}

Eigen::VectorXd DdcProblem::simulated_ols(const ParamVector& theta, double eps, Execution exec) const {
  if (theta.size() != dim_theta()) throw ContractError("DdcProblem: theta has the wrong dimension");
  if (!theta.allFinite()) throw EvaluationError("DdcProblem: non-finite theta");
  return solve_ols(accumulate(design_, x_, exec, [&](Eigen::Index i, Eigen::VectorXd& yi) {
    simulate_individual(design_, x_, shocks_, theta, eps, i, yi);
  }));
}

MomentValue DdcProblem::eval(const ParamVector& theta) const {
  return observed_ols_ - simulated_ols(theta);
}

MomentValue DdcProblem::smoothed_moments(const ParamVector& theta, double eps) const {
  if (!(eps > 0.0)) throw ContractError("DdcProblem: eps must be positive");
  return observed_ols_ - simulated_ols(theta, eps);
}

namespace {

class DdcSmoothedView final : public MomentProblem {
 public:
  DdcSmoothedView(const DdcProblem& base, double eps) : base_(base), eps_(eps) {}
  Eigen::Index dim_theta() const override { return base_.dim_theta(); }
  Eigen::Index dim_moments() const override { return base_.dim_moments(); }
  Eigen::Index sample_size() const override { return base_.sample_size(); }
  const ParamBox& box() const override { return base_.box(); }
  MomentValue eval(const ParamVector& theta) const override { return base_.smoothed_moments(theta, eps_); }

 private:
  const DdcProblem& base_;
  double eps_;
};

}  // namespace

std::unique_ptr<MomentProblem> DdcProblem::smoothed_surrogate(double eps) const {
  if (!(eps > 0.0)) throw ContractError("DdcProblem: eps must be positive");
  return std::make_unique<DdcSmoothedView>(*this, eps);
}

}  // namespace sgn
