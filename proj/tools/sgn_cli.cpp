#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sgn/covering.hpp"
#include "sgn/harness.hpp"
#include "sgn/kernels.hpp"
#include "sgn/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  std::string out = ".";
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "Experiment file (JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the master seed");
  cmd->add_option("--workers", c.workers, "Worker threads (0 = all available)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c.out, "Output directory");
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw sgn::ConfigError("cannot write " + path.string());
  return f;
}

sgn::ExperimentSpec load(const Common& c) {
  auto spec = sgn::load_experiment_spec(c.config);
  if (c.seed) spec.master_seed = *c.seed;
  return spec;
}

int run_solve(const Common& c) {
  const auto spec = load(c);
  const auto inst = sgn::make_problem(spec.problem_kind, spec.problem_params,
                                      sgn::child_seed(spec.master_seed, 0, sgn::SeedRole::Data),
                                      sgn::child_seed(spec.master_seed, 0, sgn::SeedRole::Sim));
  // same seeding as replication 0 of `replicate`
  auto cfg = sgn::resolve_for_problem(spec.solver, *inst.problem);
  cfg.seed = sgn::child_seed(spec.master_seed, 0, sgn::SeedRole::Solver);
  if (cfg.covering) {
    cfg.covering->seed = cfg.seed;
    if (spec.randomize_covering) cfg.covering->digital_shift_seed = cfg.seed;
  }
  const auto w = sgn::WeightMatrix::identity(inst.problem->dim_moments());
  const auto res = sgn::solve(*inst.problem, w, cfg);

  const fs::path trace = fs::path(c.out) / "trace.csv";
  auto f = open_out(trace);
  sgn::write_trace_csv(f, res);

  json report = {{"trace", trace.string()},
                 {"theta_best", std::vector<double>(res.theta_best.begin(), res.theta_best.end())},
                 {"best_obj_norm", res.best_obj_norm},
                 {"best_index", res.best_index},
                 {"iterations", res.iterations_run},
                 {"stopped_by", sgn::to_string(res.stopped_by)}};
  std::cout << trace.string() << '\n' << report.dump() << '\n';
  return 0;
}

int run_replicate(const Common& c) {
  const auto spec = load(c);
  const int workers = c.workers > 0 ? c.workers : sgn::kernels::max_threads();
  const auto res = sgn::run_replications(spec, workers);
  const fs::path dir(c.out);
  auto reps = open_out(dir / "replications.csv");
  sgn::write_replications_csv(reps, res);
  auto summary = open_out(dir / "summary.csv");
  sgn::write_summary_csv(summary, res);
  std::cout << (dir / "replications.csv").string() << '\n' << (dir / "summary.csv").string() << '\n';
  return 0;
}

int run_momentum_table(const std::vector<double>& gammas) {
  std::cout << "gamma,alpha_star,rate\n" << std::fixed;
  for (double g : gammas) {
    if (!(g > 0.0 && g < 1.0)) throw sgn::ConfigError("gamma must lie in (0, 1)");
    const auto m = sgn::optimal_alpha(g);
    std::cout << std::setprecision(2) << g << ',' << std::setprecision(3) << m.alpha << ','
              << m.rate << '\n';
  }
  return 0;
}

struct CoverArgs {
  int dim = 2;
  std::size_t count = 256;
  std::string kind = "sobol";
  bool randomized = false;
  std::size_t probes = std::size_t{1} << 14;
};

int run_cover(const Common& c, const CoverArgs& a) {
  if (a.dim < 1) throw sgn::ConfigError("dim must be >= 1");
  sgn::CoveringOptions opts;
  opts.kind = sgn::covering_kind_from_string(a.kind);
  opts.seed = c.seed.value_or(0);
  if (a.randomized) opts.digital_shift_seed = opts.seed;
  sgn::CoveringSequence seq(sgn::ParamBox::cube(a.dim, 0.0, 1.0), opts);
  std::vector<sgn::ParamVector> pts;
  pts.reserve(a.count);
  for (std::size_t k = 0; k < a.count; ++k) pts.push_back(seq.next_point());

  const fs::path path = fs::path(c.out) / "covering.csv";
  auto f = open_out(path);
  f << "k";
  for (int j = 0; j < a.dim; ++j) f << ",u_" << j;
  f << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    f << k;
    for (int j = 0; j < a.dim; ++j) f << ',' << pts[k][j];
    f << '\n';
  }
  const auto probes = sgn::sobol_probes(seq.box(), a.probes);
  json report = {{"points", path.string()},
                 {"kind", sgn::to_string(opts.kind)},
                 {"dim", a.dim},
                 {"count", a.count},
                 {"discrepancy", sgn::discrepancy(pts, probes)}};
  std::cout << report.dump() << '\n';
  return 0;
}

int run_chi2(int p, double level, long n) {
  if (p < 1 || n < 1) throw sgn::ConfigError("p and n must be >= 1");
  const double q = sgn::chi2_quantile(p, level);
  json report = {{"p", p}, {"level", level}, {"n", n}, {"quantile", q},
                 {"threshold", sgn::chi2_threshold(p, n, level)}};
  std::cout << report.dump() << '\n';
  return 0;
}

void error_line(const char* kind, const std::string& message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed Gauss-Newton estimation and Monte-Carlo experiments"};
  app.require_subcommand(1);

  Common common;
  auto* solve = app.add_subcommand("solve", "Run the solver once and write its trace");
  add_common(solve, common, true);
  auto* replicate = app.add_subcommand("replicate", "Run an experiment and write CSV summaries");
  add_common(replicate, common, true);

  std::vector<double> gammas{0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8};
  auto* momentum = app.add_subcommand("momentum-table", "Optimal momentum for each learning rate");
  momentum->add_option("--gamma", gammas, "Learning rates");

  CoverArgs cover_args;
  auto* cover = app.add_subcommand("cover", "Dump covering points on the unit cube and their discrepancy");
  add_common(cover, common, false);
  cover->add_option("--dim", cover_args.dim, "Dimension");
  cover->add_option("--count", cover_args.count, "Number of points");
  cover->add_option("--kind", cover_args.kind, "sobol, halton or uniform");
  cover->add_flag("--randomized", cover_args.randomized, "Digitally shift the Sobol sequence by --seed");
  cover->add_option("--probes", cover_args.probes, "Probe points for the discrepancy estimate");

  int p = 1;
  double level = 0.95;
  long n = 1;
  auto* chi2 = app.add_subcommand("chi2", "Stopping threshold chi2_p(level) / n");
  chi2->add_option("--p", p, "Number of moments")->required();
  chi2->add_option("--level", level, "Quantile level");
  chi2->add_option("--n", n, "Sample size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("usage", e.what());
    return 2;
  }

  try {
    if (*solve) return run_solve(common);
    if (*replicate) return run_replicate(common);
    if (*momentum) return run_momentum_table(gammas);
    if (*cover) return run_cover(common, cover_args);
    if (*chi2) return run_chi2(p, level, n);
  } catch (const sgn::Error& e) {
    error_line(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    error_line("internal", e.what());
    return 1;
  }
  return 0;
}
