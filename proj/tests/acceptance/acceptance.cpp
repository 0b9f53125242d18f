// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "sgn/baseline.hpp"
#include "sgn/covering.hpp"
#include "sgn/harness.hpp"
#include "sgn/kernels.hpp"
#include "sgn/problems/ddc.hpp"
#include "sgn/problems/quantile.hpp"
#include "sgn/problems/quantreg.hpp"
#include "sgn/problems/toy.hpp"
#include "sgn/qn.hpp"
#include "sgn/rng.hpp"
#include "sgn/smoothing.hpp"
#include "sgn/solver.hpp"
#include "sgn/stats.hpp"

using namespace sgn;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ParamVector scalar(double x) { return ParamVector::Constant(1, x); }

int workers() { return std::max(1, kernels::max_threads()); }

// R's default sample quantile: linear interpolation between order statistics.
double type7_quantile(const std::vector<double>& sorted, double t) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * t;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Outcome quantile_table() {
  Outcome out;
  struct Column {
    double eps, qn_size, sgn_size, sgmm_avg, sgmm_size;
  };
  const std::array<Column, 3> cols{{{0.5, 0.037, 0.038, 0.584, 0.043},
                                    {0.2, 0.055, 0.058, 0.533, 0.036},
                                    {0.1, 0.065, 0.068, 0.525, 0.054}}};
  for (const auto& col : cols) {
    nlohmann::json solver = {{"gamma", 0.1},        {"eps", col.eps},   {"b_max", 200},
                             {"theta0", 0.0},       {"covering", nullptr},
                             {"jacobian", {{"mode", "closed_form"}}}};
    nlohmann::json j = {{"problem", {{"kind", "quantile"}, {"n", 250}, {"t", 0.7}}},
                        {"solver", solver},
                        {"baseline", solver},
                        {"replications", 500},
                        {"master_seed", 20240501}};
    const auto res = run_replications(experiment_spec_from_json(j), workers());
    const auto& sgn = res.summaries.at(0).summary.coefficients.at(0);
    const auto& gmm = res.summaries.at(1).summary.coefficients.at(0);

    // Interpolated sample quantile on the same datasets.
    std::vector<ParamVector> qhat;
    std::vector<Eigen::VectorXd> qse;
    for (int r = 0; r < 500; ++r) {
      const auto prob = QuantileProblem::generate_normal(
          250, 0.7, child_seed(20240501, static_cast<std::uint64_t>(r), SeedRole::Data));
      const double q = type7_quantile(prob.sorted(), 0.7);
      qhat.push_back(scalar(q));
      qse.push_back(Eigen::VectorXd::Constant(1, prob.std_err(q, col.eps)));
    }
    const auto qn = summarize(qhat, res.theta_dagger, qse).coefficients.at(0);

    const std::string tag = fmt("eps=%.1f", col.eps);
    out.require(std::fabs(sgn.avg - 0.518) <= 0.02, tag + fmt(" sGN avg %.4f", sgn.avg));
    out.require(std::fabs(sgn.std - 0.085) <= 0.02, fmt("std %.4f", sgn.std));
    out.require(std::fabs(*sgn.size - col.sgn_size) <= 0.03, fmt("size %.3f", *sgn.size));
    out.require(std::fabs(gmm.avg - col.sgmm_avg) <= 0.02, fmt("sGMM avg %.4f", gmm.avg));
    out.require(std::fabs(gmm.std - 0.085) <= 0.03, fmt("std %.4f", gmm.std));
    out.require(std::fabs(*gmm.size - col.sgmm_size) <= 0.03, fmt("size %.3f", *gmm.size));
    out.require(std::fabs(qn.avg - 0.520) <= 0.02, fmt("quantile avg %.4f", qn.avg));
    out.require(std::fabs(*qn.size - col.qn_size) <= 0.03, fmt("size %.3f", *qn.size));
  }
  return out;
}

Outcome momentum_table() {
  Outcome out;
  const std::array<std::array<double, 3>, 8> table{{{0.01, 0.81, 0.10},
                                                    {0.05, 0.60, 0.22},
                                                    {0.1, 0.47, 0.32},
                                                    {0.2, 0.31, 0.45},
                                                    {0.3, 0.21, 0.54},
                                                    {0.4, 0.14, 0.63},
                                                    {0.6, 0.05, 0.77},
                                                    {0.8, 0.01, 0.89}}};
  for (const auto& [g, a, r] : table) {
    const auto best = optimal_alpha(g);
    out.require(std::fabs(best.alpha - a) <= 0.02 && std::fabs(best.rate - r) <= 0.01,
                fmt("gamma=%.2f alpha*=%.3f rate=%.3f", g, best.alpha, best.rate));
  }
  return out;
}

Outcome ddc_experiment() {
  Outcome out;
  nlohmann::json j = {
      {"problem", {{"kind", "ddc"}, {"n", 250}, {"T", 10}, {"beta_dim", 14}}},
      {"solver",
       {{"gamma", 0.1}, {"eps", 0.1}, {"alpha", 0.47}, {"b_max", 300}, {"theta0", 0.0},
        {"jacobian", {{"mode", "quasi_newton"}, {"L", 25}}}}},
      {"replications", 20},
      {"master_seed", 51}};
  const auto res = run_replications(experiment_spec_from_json(j), workers());
  const auto& s = res.summaries.at(0).summary;
  const auto& b1 = s.coefficients.at(0);
  const auto& rho = s.coefficients.at(14);
  const int ok = s.count - s.chi2_failures;
  out.require(std::fabs(b1.bias) <= 0.05, fmt("bias(beta1) %.4f", b1.bias));
  out.require(b1.mae <= 0.08, fmt("MAE(beta1) %.4f", b1.mae));
  out.require(rho.bias >= -0.15 && rho.bias <= 0.0, fmt("bias(rho) %.4f", rho.bias));
  out.require(s.errors == 0 && ok >= 18, fmt("chi2 pass %.0f/%.0f", ok, s.count + s.errors));
  return out;
}

Outcome fixed_point() {
  Outcome out;
  const auto prob = QuantileProblem::generate_normal(250, 0.7, 4242);
  const auto& s = prob.sorted();
  const double root = 0.5 * (s[174] + s[175]);
  out.require(prob.moment(root) == 0.0, "F_n(root) = t");
  for (double eps : {0.01, 0.1, 1.0}) {
    SolverConfig cfg;
    cfg.eps = eps;
    cfg.theta0 = scalar(root);
    cfg.covering.reset();
    cfg.jacobian.mode = JacobianMode::ClosedForm;
    cfg.b_max = 51;
    const auto res = solve(prob, WeightMatrix::identity(1), cfg);
    double drift = 0.0;
    for (const auto& r : res.trace) drift = std::max(drift, std::fabs(r.theta[0] - root));
    out.require(drift == 0.0, fmt("sGN eps=%.2f drift %.1e", eps, drift));
  }
  SolverConfig cfg;
  cfg.eps = 1.0;
  cfg.theta0 = scalar(root);
  cfg.covering.reset();
  cfg.b_max = 51;
  const auto base = baseline_smoothed_gn_solve(prob, WeightMatrix::identity(1), cfg);
  const double moved = std::fabs(base.trace.back().theta[0] - root);
  out.require(moved > 1e-3, fmt("baseline eps=1 moved %.4f", moved));
  return out;
}

Outcome qn_exactness() {
  Outcome out;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int d = std::uniform_int_distribution<int>(1, 10)(rng);
    const int p = std::uniform_int_distribution<int>(d, 10)(rng);
    const int L = std::uniform_int_distribution<int>(d + 1, 3 * d)(rng);
    Eigen::MatrixXd a(p, d);
    Eigen::VectorXd b(p), th(d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
    for (int i = 0; i < p; ++i) b[i] = nd(rng);
    for (int i = 0; i < d; ++i) th[i] = nd(rng);
    const LinearProblem prob(a, b, ParamBox::cube(d, -100, 100));
    auto buf = QnBuffer::init(prob, th, 0.1, L, static_cast<std::uint64_t>(trial));
    const int moves = std::uniform_int_distribution<int>(0, L)(rng);
    for (int k = 0; k < moves; ++k) {
      for (int i = 0; i < d; ++i) th[i] += 0.3 * nd(rng);
      buf.update(prob, th, prob.eval(th));
    }
    worst = std::max(worst, (buf.least_squares() - a).norm() / a.norm());
  }
  out.require(worst <= 1e-8, fmt("worst relative Frobenius error %.2e", worst));
  return out;
}

Outcome mc_unbiased() {
  Outcome out;
  const auto prob = QuantileProblem::generate_normal(250, 0.7, 606);
  const double theta = 0.5;
  for (double eps : {0.1, 0.5}) {
    const double f = prob.smoothed(theta, eps).f_eps;
    double s = 0, s2 = 0;
    const int seeds = 200;
    for (int k = 0; k < seeds; ++k) {
      const double g = mc_jacobian(prob, scalar(theta), SmoothingConfig{eps, 100, static_cast<std::uint64_t>(k)})(0, 0);
      s += g;
      s2 += g * g;
    }
    const double mean = s / seeds;
    const double se = std::sqrt((s2 - seeds * mean * mean) / (seeds - 1) / seeds);
    out.require(std::fabs(mean - f) <= 3 * se,
                fmt("eps=%.1f mean %.4f vs f %.4f", eps, mean, f) + fmt(" (3se %.4f)", 3 * se));
  }
  return out;
}

Outcome two_basin() {
  Outcome out;
  const TwoBasinProblem prob;
  double grid_best = 0.0, best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100000; ++i) {
    const double th = -3.0 + 6.0 * i / 99999.0;
    const double v = prob.eval(scalar(th)).squaredNorm();
    if (v < best_val) {
      best_val = v;
      grid_best = th;
    }
  }
  int global_hits = 0, local_hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(derive_seed(seed, {7}));
    const double start = std::uniform_real_distribution<double>(-3.0, -0.5)(rng);
    SolverConfig cfg;
    cfg.eps = 0.1;
    cfg.theta0 = scalar(start);
    cfg.jacobian.mode = JacobianMode::ClosedForm;
    cfg.b_max = 300;
    cfg.covering->digital_shift_seed = seed;
    if (std::fabs(solve(prob, WeightMatrix::identity(2), cfg).theta_best[0] - grid_best) <= 1e-2) ++global_hits;
    cfg.covering.reset();
    if (std::fabs(solve(prob, WeightMatrix::identity(2), cfg).theta_best[0] - grid_best) <= 1e-2) ++local_hits;
  }
  out.require(global_hits >= 95, fmt("sGN %.0f/100 reach %.4f", global_hits, grid_best));
  out.require(local_hits < 50, fmt("local-only %.0f/100", local_hits));
  return out;
}

Outcome covering_dominance() {
  Outcome out;
  const ParamBox unit = ParamBox::cube(2, 0, 1);
  const auto probes = grid_probes(unit, 64);
  auto first = [&](CoveringOptions opts) {
    CoveringSequence seq(unit, opts);
    std::vector<ParamVector> pts;
    for (int k = 0; k < 256; ++k) pts.push_back(seq.next_point());
    return discrepancy(pts, probes);
  };
  const double sobol = first({});
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CoveringOptions u;
    u.kind = CoveringKind::UniformRandom;
    u.seed = seed;
    if (sobol < first(u)) ++wins;
  }
  out.require(wins >= 18, fmt("Sobol %.4f wins %.0f/20", sobol, wins));
  return out;
}

Outcome gradient_checks() {
  Outcome out;
  const double h = 1e-5;
  std::mt19937_64 rng(99);
  double worst_q = 0.0, worst_r = 0.0;
  const auto q = QuantileProblem::generate_normal(250, 0.7, 1);
  const auto r = QuantRegProblem::generate(250, 3, 2, 0.3, 2);
  std::uniform_real_distribution<double> uq(-2.0, 2.0), ur(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double eps = k % 2 == 0 ? 0.1 : 0.5;
    const double th = uq(rng);
    const double fd = (q.smoothed(th + h, eps).gbar_eps - q.smoothed(th - h, eps).gbar_eps) / (2 * h);
    worst_q = std::max(worst_q, std::fabs(fd - q.smoothed(th, eps).f_eps) / std::fabs(fd));

    Eigen::VectorXd t(3);
    for (int i = 0; i < 3; ++i) t[i] = 0.5 + ur(rng);
    const Jacobian g = r.smoothed(t, eps).jacobian;
    Jacobian fdj(g.rows(), g.cols());
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
      e[i] = h;
      fdj.col(i) = (r.smoothed(t + e, eps).moments - r.smoothed(t - e, eps).moments) / (2 * h);
    }
    worst_r = std::max(worst_r, (fdj - g).norm() / fdj.norm());
  }
  out.require(worst_q <= 1e-4, fmt("quantile worst %.2e", worst_q));
  out.require(worst_r <= 1e-4, fmt("quantreg worst %.2e", worst_r));
  return out;
}

Outcome local_rate() {
  Outcome out;
  const auto prob = SmoothSystemProblem::standard();
  SolverConfig cfg;
  cfg.gamma = 0.1;
  cfg.eps = 0.01;
  cfg.covering.reset();
  cfg.jacobian.mode = JacobianMode::ClosedForm;
  cfg.b_max = 400;
  cfg.theta0 = (Eigen::VectorXd(3) << -1.0, 1.0, 0.0).finished();
  const double e0 = (*cfg.theta0 - prob.root()).norm();
  const auto plain = solve(prob, WeightMatrix::identity(3), cfg);
  double worst = 0.0;
  for (int b = 0; b <= 50; ++b)
    worst = std::max(worst, (plain.trace[static_cast<std::size_t>(b)].theta - prob.root()).norm() /
                                (std::pow(0.92, b) * e0));
  out.require(worst <= 1.0, fmt("max error/bound %.3f", worst));
  auto hit = [&](const SolverResult& r) {
    for (const auto& rec : r.trace)
      if ((rec.theta - prob.root()).norm() <= 1e-6) return rec.b;
    return 1 << 30;
  };
  cfg.alpha = 0.47;
  const auto heavy = solve(prob, WeightMatrix::identity(3), cfg);
  out.require(hit(heavy) < hit(plain), fmt("1e-6 reached at b=%.0f (momentum) vs %.0f", hit(heavy), hit(plain)));
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"quantile table", quantile_table},
      {"momentum table", momentum_table},
      {"DDC experiment", ddc_experiment},
      {"bandwidth-robust fixed point", fixed_point},
      {"quasi-Newton exactness", qn_exactness},
      {"MC Jacobian unbiasedness", mc_unbiased},
      {"two-basin global convergence", two_basin},
      {"covering dominance", covering_dominance},
      {"gradient checks", gradient_checks},
      {"local rate and momentum", local_rate}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s [%zu] %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
