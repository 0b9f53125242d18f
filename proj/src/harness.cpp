#include "sgn/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sgn/baseline.hpp"
#include "sgn/problems/ddc.hpp"
#include "sgn/problems/quantile.hpp"
#include "sgn/problems/quantreg.hpp"
#include "sgn/problems/toy.hpp"
#include "sgn/rng.hpp"
#include "sgn/stats.hpp"

namespace sgn {

using nlohmann::json;

namespace {

constexpr double kCritical5 = 1.95996;

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index dim, const char* what,
                                 bool exact_length = true) {
  if (j.is_number()) return Eigen::VectorXd::Constant(dim, j.get<double>());
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected a number or an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  if (exact_length && v.size() != dim) throw ConfigError(std::string(what) + ": wrong length");
  return v;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Quantile: return "quantile";
    case ProblemKind::QuantReg: return "quantreg";
    case ProblemKind::Ddc: return "ddc";
    case ProblemKind::Toy: return "toy";
  }
  return "unknown";
}

ProblemKind problem_kind_from_string(const std::string& name) {
  if (name == "quantile") return ProblemKind::Quantile;
  if (name == "quantreg") return ProblemKind::QuantReg;
  if (name == "ddc") return ProblemKind::Ddc;
  if (name == "toy") return ProblemKind::Toy;
  throw ConfigError("unknown problem kind '" + name + "'");
}

std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t replication, SeedRole role) {
  return derive_seed(master_seed, {replication, static_cast<std::uint64_t>(role)});
}

ProblemInstance make_problem(ProblemKind kind, const json& params, std::uint64_t data_seed,
                             std::uint64_t sim_seed) {
  ProblemInstance inst;
  switch (kind) {
    case ProblemKind::Quantile: {
      const double t = get_or(params, "t", 0.7);
      std::shared_ptr<QuantileProblem> prob;
      if (params.contains("data_csv")) {
        std::ifstream in(params.at("data_csv").get<std::string>());
        if (!in) throw ConfigError("cannot open quantile data file");
        prob = std::make_shared<QuantileProblem>(QuantileProblem::read_csv(in, t));
      } else {
        const auto n = get_or<std::size_t>(params, "n", 250);
        prob = std::make_shared<QuantileProblem>(QuantileProblem::generate_normal(n, t, data_seed));
      }
      if (params.contains("box")) {
        const Eigen::VectorXd b = vector_from_json(params.at("box"), 2, "quantile box");
        prob = std::make_shared<QuantileProblem>(prob->data(), t,
                                                 ParamBox(b.head(1), b.tail(1)));
      }
      inst.theta_dagger = ParamVector::Constant(1, normal_quantile(t));
      inst.std_err = [prob](const ParamVector& theta, double eps) -> std::optional<Eigen::VectorXd> {
        return Eigen::VectorXd::Constant(1, prob->std_err(theta[0], eps));
      };
      inst.problem = prob;
      break;
    }
    case ProblemKind::QuantReg: {
      const double t = get_or(params, "t", 0.5);
      const auto d = get_or<Eigen::Index>(params, "d_theta", 2);
      const auto extra = get_or<Eigen::Index>(params, "extra_instruments", 0);
      const auto n = get_or<std::size_t>(params, "n", 500);
      const double half = get_or(params, "box_half_width", 5.0);
      auto prob = std::make_shared<QuantRegProblem>(
          QuantRegProblem::generate(n, d, extra, t, data_seed, half));
      ParamVector truth = ParamVector::Constant(d, 0.5);
      truth[0] = 1.0 + normal_quantile(1.0 - t);
      inst.theta_dagger = truth;
      inst.problem = prob;
      break;
    }
    case ProblemKind::Ddc: {
      DdcDesign design;
      design.n = get_or<Eigen::Index>(params, "n", 250);
      design.T = get_or<Eigen::Index>(params, "T", 10);
      design.beta_dim = get_or<Eigen::Index>(params, "beta_dim", 14);
      Eigen::VectorXd lo = Eigen::VectorXd::Constant(design.beta_dim + 1, -get_or(params, "beta_bound", 2.0));
      Eigen::VectorXd hi = -lo;
      lo[design.beta_dim] = -get_or(params, "rho_bound", 1.0);
      hi[design.beta_dim] = get_or(params, "rho_bound", 1.0);
      inst.theta_dagger = ddc_true_params(design.beta_dim);
      inst.problem = std::make_shared<DdcProblem>(
          DdcProblem::generate(design, inst.theta_dagger, data_seed, sim_seed, ParamBox(lo, hi)));
      break;
    }
    case ProblemKind::Toy: {
      const auto name = get_or<std::string>(params, "name", "two_basin");
      if (name == "two_basin") {
        inst.problem = std::make_shared<TwoBasinProblem>();
        inst.theta_dagger = ParamVector::Constant(1, 1.0);
      } else if (name == "smooth_system") {
        auto prob = std::make_shared<SmoothSystemProblem>(SmoothSystemProblem::standard());
        inst.theta_dagger = prob->root();
        inst.problem = prob;
      } else {
        throw ConfigError("unknown toy problem '" + name + "'");
      }
      break;
    }
  }
  return inst;
}

void ExperimentSpec::validate() const {
  if (replications < 1) throw ConfigError("experiment: replications must be >= 1");
  solver.validate();
  if (baseline) baseline->validate();
}

SolverConfig solver_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("solver: expected an object");
  SolverConfig cfg;
  cfg.gamma = get_or(j, "gamma", cfg.gamma);
  if (j.contains("eps") && !j.at("eps").is_null()) cfg.eps = j.at("eps").get<double>();
  if (j.contains("alpha")) {
    const auto& a = j.at("alpha");
    cfg.alpha = a.is_string() && a.get<std::string>() == "optimal" ? optimal_alpha(cfg.gamma).alpha
                                                                    : a.get<double>();
  }
  if (j.contains("jacobian")) {
    const json& jj = j.at("jacobian");
    const auto mode = get_or<std::string>(jj, "mode", "quasi_newton");
    if (mode == "closed_form") cfg.jacobian.mode = JacobianMode::ClosedForm;
    else if (mode == "monte_carlo") cfg.jacobian.mode = JacobianMode::MonteCarlo;
    else if (mode == "quasi_newton") cfg.jacobian.mode = JacobianMode::QuasiNewton;
    else throw ConfigError("unknown jacobian mode '" + mode + "'");
    cfg.jacobian.L = get_or(jj, "L", 0);
    cfg.jacobian.directions_per_iter = get_or(jj, "directions_per_iter", 1);
    const auto est = get_or<std::string>(jj, "estimator", "least_squares");
    if (est == "least_squares") cfg.jacobian.estimator = QnEstimator::LeastSquares;
    else if (est == "sample_mean") cfg.jacobian.estimator = QnEstimator::SampleMean;
    else throw ConfigError("unknown quasi-Newton estimator '" + est + "'");
  }
  if (j.contains("covering")) {
    const json& jc = j.at("covering");
    if (jc.is_null() || (jc.is_boolean() && !jc.get<bool>())) {
      cfg.covering.reset();
    } else if (jc.is_object()) {
      CoveringOptions opts;
      opts.kind = covering_kind_from_string(get_or<std::string>(jc, "kind", "sobol"));
      opts.skip_first = get_or(jc, "skip_first", true);
      if (jc.contains("digital_shift_seed")) opts.digital_shift_seed = jc.at("digital_shift_seed").get<std::uint64_t>();
      opts.seed = get_or<std::uint64_t>(jc, "seed", 0);
      cfg.covering = opts;
    } else {
      throw ConfigError("covering: expected an object or null");
    }
  }
  cfg.b_max = get_or(j, "b_max", cfg.b_max);
  if (j.contains("stop")) {
    const json& js = j.at("stop");
    const auto mode = get_or<std::string>(js, "mode", "fixed");
    if (mode == "fixed") cfg.stop = StoppingRule::fixed();
    else if (mode == "chi2") cfg.stop = StoppingRule::chi_square(get_or(js, "level", 0.95), get_or(js, "extra_j", 0));
    else throw ConfigError("unknown stopping mode '" + mode + "'");
  }
  cfg.sigma_tol = get_or(j, "sigma_tol", cfg.sigma_tol);
  // A scalar θ0 is stored with length 1 and broadcast once the problem is known.
  if (j.contains("theta0") && !j.at("theta0").is_null()) cfg.theta0 = vector_from_json(j.at("theta0"), 1, "theta0", false);
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.validate();
  return cfg;
}

json solver_config_to_json(const SolverConfig& cfg) {
  json j;
  j["gamma"] = cfg.gamma;
  j["eps"] = cfg.eps ? json(*cfg.eps) : json(nullptr);
  j["alpha"] = cfg.alpha;
  const char* mode = cfg.jacobian.mode == JacobianMode::ClosedForm   ? "closed_form"
                     : cfg.jacobian.mode == JacobianMode::MonteCarlo ? "monte_carlo"
                                                                     : "quasi_newton";
  j["jacobian"] = {{"mode", mode},
                   {"L", cfg.jacobian.L},
                   {"directions_per_iter", cfg.jacobian.directions_per_iter},
                   {"estimator", cfg.jacobian.estimator == QnEstimator::LeastSquares ? "least_squares" : "sample_mean"}};
  if (cfg.covering) {
    json c = {{"kind", to_string(cfg.covering->kind)},
              {"skip_first", cfg.covering->skip_first},
              {"seed", cfg.covering->seed}};
    if (cfg.covering->digital_shift_seed) c["digital_shift_seed"] = *cfg.covering->digital_shift_seed;
    j["covering"] = c;
  } else {
    j["covering"] = nullptr;
  }
  j["b_max"] = cfg.b_max;
  if (cfg.stop.mode == StoppingRule::Mode::FixedIterations) j["stop"] = {{"mode", "fixed"}};
  else j["stop"] = {{"mode", "chi2"}, {"level", cfg.stop.level}, {"extra_j", cfg.stop.extra_j}};
  j["sigma_tol"] = cfg.sigma_tol;
  if (cfg.theta0) j["theta0"] = std::vector<double>(cfg.theta0->data(), cfg.theta0->data() + cfg.theta0->size());
  j["seed"] = cfg.seed;
  return j;
}

ExperimentSpec experiment_spec_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("experiment: expected an object");
  ExperimentSpec spec;
  if (!j.contains("problem") || !j.at("problem").is_object())
    throw ConfigError("experiment: missing 'problem' object");
  spec.problem_params = j.at("problem");
  spec.problem_kind = problem_kind_from_string(get_or<std::string>(spec.problem_params, "kind", ""));
  spec.solver = solver_config_from_json(j.value("solver", json::object()));
  if (j.contains("baseline") && !j.at("baseline").is_null())
    spec.baseline = solver_config_from_json(j.at("baseline"));
  spec.replications = get_or(j, "replications", 1);
  spec.master_seed = get_or<std::uint64_t>(j, "master_seed", 0);
  spec.output_path = get_or<std::string>(j, "output", "");
  spec.randomize_covering = get_or(j, "randomize_covering", false);
  spec.validate();
  return spec;
}

json experiment_spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["problem"] = spec.problem_params;
  j["problem"]["kind"] = to_string(spec.problem_kind);
  j["solver"] = solver_config_to_json(spec.solver);
  if (spec.baseline) j["baseline"] = solver_config_to_json(*spec.baseline);
  j["replications"] = spec.replications;
  j["master_seed"] = spec.master_seed;
  j["output"] = spec.output_path;
  j["randomize_covering"] = spec.randomize_covering;
  return j;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  try {
    return experiment_spec_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ReplicationSummary summarize(const std::vector<ParamVector>& theta_tilde,
                             const ParamVector& theta_dagger,
                             const std::vector<Eigen::VectorXd>& std_errs) {
  if (theta_tilde.empty()) throw ContractError("summarize: no estimates");
  if (!std_errs.empty() && std_errs.size() != theta_tilde.size())
    throw ContractError("summarize: one standard-error vector per estimate is required");
  const Eigen::Index d = theta_dagger.size();
  const double r = static_cast<double>(theta_tilde.size());
  ReplicationSummary out;
  out.count = static_cast<int>(theta_tilde.size());
  out.coefficients.resize(static_cast<std::size_t>(d));
  for (Eigen::Index k = 0; k < d; ++k) {
    auto& c = out.coefficients[static_cast<std::size_t>(k)];
    c.theta_dagger = theta_dagger[k];
    double sum = 0.0, abs_err = 0.0;
    for (const auto& est : theta_tilde) {
      if (est.size() != d) throw ContractError("summarize: estimate has the wrong dimension");
      sum += est[k];
      abs_err += std::fabs(est[k] - theta_dagger[k]);
    }
    c.avg = sum / r;
    c.bias = c.avg - theta_dagger[k];
    c.mae = abs_err / r;
    double ss = 0.0;
    for (const auto& est : theta_tilde) ss += (est[k] - c.avg) * (est[k] - c.avg);
    c.std = theta_tilde.size() > 1 ? std::sqrt(ss / (r - 1.0)) : 0.0;
    if (!std_errs.empty()) {
      int rejections = 0;
      for (std::size_t i = 0; i < theta_tilde.size(); ++i)
        if (std::fabs(theta_tilde[i][k] - theta_dagger[k]) / std_errs[i][k] > kCritical5) ++rejections;
      c.size = rejections / r;
    }
  }
  return out;
}

SolverConfig resolve_for_problem(SolverConfig cfg, const MomentProblem& problem) {
  if (cfg.theta0 && cfg.theta0->size() == 1 && problem.dim_theta() != 1)
    cfg.theta0 = ParamVector::Constant(problem.dim_theta(), (*cfg.theta0)[0]);
  return cfg;
}

namespace {

ReplicationRecord run_method(const ProblemInstance& inst, const SolverConfig& cfg, bool baseline,
                             int replication) {
  ReplicationRecord rec;
  rec.replication = replication;
  rec.method = baseline ? "baseline" : "sgn";
  try {
    const MomentProblem& problem = *inst.problem;
    const WeightMatrix w = WeightMatrix::identity(problem.dim_moments());
    const SolverResult res = baseline ? baseline_smoothed_gn_solve(problem, w, cfg) : solve(problem, w, cfg);
    rec.estimate = res.theta_best;
    rec.iterations = res.iterations_run;
    // Report the raw moment norm for both methods so they are comparable.
    rec.obj_norm = weighted_norm(problem.eval(res.theta_best), w);
    rec.chi2_pass = rec.obj_norm * rec.obj_norm <=
                    chi2_threshold(problem.dim_moments(), problem.sample_size(), 0.95);
    if (inst.std_err) rec.std_err = inst.std_err(res.theta_best, cfg.resolve_eps(problem.sample_size()));
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<MethodSummary> summarize_records(const std::vector<ReplicationRecord>& records,
                                             const ParamVector& theta_dagger) {
  std::vector<MethodSummary> out;
  for (const char* method : {"sgn", "baseline"}) {
    std::vector<ParamVector> est;
    std::vector<Eigen::VectorXd> se;
    bool all_se = true;
    int errors = 0, chi2_fail = 0;
    double obj = 0.0;
    bool seen = false;
    for (const auto& r : records) {
      if (r.method != method) continue;
      seen = true;
      if (!r.ok) {
        ++errors;
        continue;
      }
      est.push_back(r.estimate);
      if (r.std_err) se.push_back(*r.std_err);
      else all_se = false;
      obj += r.obj_norm;
      if (!r.chi2_pass) ++chi2_fail;
    }
    if (!seen) continue;
    MethodSummary ms;
    ms.method = method;
    if (!est.empty()) {
      ms.summary = summarize(est, theta_dagger, all_se ? se : std::vector<Eigen::VectorXd>{});
      ms.summary.mean_obj_norm = obj / static_cast<double>(est.size());
    }
    ms.summary.errors = errors;
    ms.summary.chi2_failures = chi2_fail;
    out.push_back(std::move(ms));
  }
  return out;
}

ExperimentResult run_replications(const ExperimentSpec& spec, int workers) {
  spec.validate();
  if (workers < 1) throw ConfigError("workers must be >= 1");
  const int methods = spec.baseline ? 2 : 1;
  const int reps = spec.replications;
  std::vector<ReplicationRecord> records(static_cast<std::size_t>(reps * methods));
  std::vector<ParamVector> daggers(static_cast<std::size_t>(reps));

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int r = 0; r < reps; ++r) {
    const auto ru = static_cast<std::uint64_t>(r);
    const std::uint64_t solver_seed = child_seed(spec.master_seed, ru, SeedRole::Solver);
    auto slot = [&](int m) -> ReplicationRecord& {
      return records[static_cast<std::size_t>(r * methods + m)];
    };
    ProblemInstance inst;
    try {
      inst = make_problem(spec.problem_kind, spec.problem_params,
                          child_seed(spec.master_seed, ru, SeedRole::Data),
                          child_seed(spec.master_seed, ru, SeedRole::Sim));
    } catch (const std::exception& e) {
      for (int m = 0; m < methods; ++m) {
        slot(m).replication = r;
        slot(m).method = m == 0 ? "sgn" : "baseline";
        slot(m).error = e.what();
      }
      continue;
    }
    daggers[static_cast<std::size_t>(r)] = inst.theta_dagger;
    auto configure = [&](SolverConfig cfg) {
      cfg = resolve_for_problem(cfg, *inst.problem);
      cfg.seed = solver_seed;
      if (cfg.covering) {
        cfg.covering->seed = solver_seed;
        if (spec.randomize_covering) cfg.covering->digital_shift_seed = solver_seed;
      }
      return cfg;
    };
    slot(0) = run_method(inst, configure(spec.solver), false, r);
    if (spec.baseline) slot(1) = run_method(inst, configure(*spec.baseline), true, r);
  }

  ExperimentResult result;
  for (const auto& d : daggers)
    if (d.size() > 0) {
      result.theta_dagger = d;
      break;
    }
  result.records = std::move(records);
  const bool any_ok = std::any_of(result.records.begin(), result.records.end(),
                                  [](const ReplicationRecord& r) { return r.ok && r.method == "sgn"; });
  if (!any_ok) {
    std::string first_error;
    for (const auto& r : result.records)
      if (!r.error.empty()) {
        first_error = r.error;
        break;
      }
    throw ExperimentError("every replication failed; first error: " + first_error);
  }
  result.summaries = summarize_records(result.records, result.theta_dagger);
  return result;
}

void write_replications_csv(std::ostream& out, const ExperimentResult& result) {
  const auto precision = out.precision(17);
  out << "replication,method,coefficient,estimate,std_err,obj_norm,iterations,chi2_pass,status\n";
  for (const auto& r : result.records) {
    if (!r.ok) {
      out << r.replication << ',' << r.method << ",-1,,,,,,error:" << sanitize(r.error) << '\n';
      continue;
    }
    for (Eigen::Index k = 0; k < r.estimate.size(); ++k) {
      out << r.replication << ',' << r.method << ',' << k << ',' << r.estimate[k] << ',';
      if (r.std_err) out << (*r.std_err)[k];
      out << ',' << r.obj_norm << ',' << r.iterations << ',' << (r.chi2_pass ? 1 : 0) << ",ok\n";
    }
  }
  out.precision(precision);
}

void write_summary_csv(std::ostream& out, const ExperimentResult& result) {
  const auto precision = out.precision(17);
  out << "method,coefficient,theta_dagger,avg,std,bias,mae,size,mean_obj_norm,count,chi2_failures,errors\n";
  for (const auto& ms : result.summaries) {
    const auto& s = ms.summary;
    for (std::size_t k = 0; k < s.coefficients.size(); ++k) {
      const auto& c = s.coefficients[k];
      out << ms.method << ',' << k << ',' << c.theta_dagger << ',' << c.avg << ',' << c.std << ','
          << c.bias << ',' << c.mae << ',';
      if (c.size) out << *c.size;
      out << ',' << s.mean_obj_norm << ',' << s.count << ',' << s.chi2_failures << ',' << s.errors
          << '\n';
    }
  }
  out.precision(precision);
}

std::vector<ReplicationRecord> read_replications_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("replication,", 0) != 0)
    throw ConfigError("replications csv: missing header");
  std::vector<ReplicationRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < 9) cells.emplace_back();
    const int rep = std::stoi(cells[0]);
    const std::string& method = cells[1];
    const int coef = std::stoi(cells[2]);
    if (coef < 0) {
      ReplicationRecord r;
      r.replication = rep;
      r.method = method;
      r.error = cells[8];
      records.push_back(std::move(r));
      continue;
    }
    if (coef == 0) {
      ReplicationRecord r;
      r.replication = rep;
      r.method = method;
      r.ok = true;
      r.obj_norm = std::stod(cells[5]);
      r.iterations = std::stoi(cells[6]);
      r.chi2_pass = cells[7] == "1";
      records.push_back(std::move(r));
    }
    auto& r = records.back();
    if (r.replication != rep || r.method != method || coef != r.estimate.size())
      throw ConfigError("replications csv: coefficients out of order");
    r.estimate.conservativeResize(coef + 1);
    r.estimate[coef] = std::stod(cells[3]);
    if (!cells[4].empty()) {
      if (!r.std_err) r.std_err = Eigen::VectorXd();
      r.std_err->conservativeResize(coef + 1);
      (*r.std_err)[coef] = std::stod(cells[4]);
    }
  }
  return records;
}

}  // namespace sgn
