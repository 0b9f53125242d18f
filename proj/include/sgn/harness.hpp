#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgn/solver.hpp"

namespace sgn {

enum class ProblemKind { Quantile, QuantReg, Ddc, Toy };

const char* to_string(ProblemKind kind);
ProblemKind problem_kind_from_string(const std::string& name);

/// Seed roles so that data, simulation and solver streams never collide.
enum class SeedRole : std::uint64_t { Data = 11, Sim = 12, Solver = 13 };

std::uint64_t child_seed(std::uint64_t master_seed, std::uint64_t replication, SeedRole role);

/// One generated problem together with what the summary needs to know about it.
struct ProblemInstance {
  std::shared_ptr<const MomentProblem> problem;
  ParamVector theta_dagger;
  /// Standard errors of an estimate at bandwidth ε, when the problem defines them.
  std::function<std::optional<Eigen::VectorXd>(const ParamVector&, double)> std_err;
};

/// Build a problem of `kind` from its parameter map and the replication's seeds.
ProblemInstance make_problem(ProblemKind kind, const nlohmann::json& params,
                             std::uint64_t data_seed, std::uint64_t sim_seed);

struct ExperimentSpec {
  ProblemKind problem_kind = ProblemKind::Quantile;
  nlohmann::json problem_params = nlohmann::json::object();
  SolverConfig solver;
  std::optional<SolverConfig> baseline;
  int replications = 1;
  std::uint64_t master_seed = 0;
  std::string output_path;
  /// Randomize the Sobol sequence per replication with a digital shift.
  bool randomize_covering = false;

  void validate() const;
};

SolverConfig solver_config_from_json(const nlohmann::json& j);
nlohmann::json solver_config_to_json(const SolverConfig& cfg);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec load_experiment_spec(const std::string& path);

/// Broadcast a scalar θ0 to the problem's dimension.
SolverConfig resolve_for_problem(SolverConfig cfg, const MomentProblem& problem);

struct CoefficientSummary {
  double theta_dagger = 0.0;
  double avg = 0.0;
  double std = 0.0;   // sample standard deviation (R − 1 denominator)
  double bias = 0.0;  // avg − θ†
  double mae = 0.0;   // mean |θ̃ − θ†|
  std::optional<double> size;  // rejection rate of H0: θ = θ† at 5%
};

struct ReplicationSummary {
  std::vector<CoefficientSummary> coefficients;
  double mean_obj_norm = 0.0;
  int count = 0;          // replications summarized
  int chi2_failures = 0;  // final squared norm above the χ² threshold
  int errors = 0;         // replications that raised
};

/// Per-coefficient avg, std, bias, MAE and (when standard errors are given) size,
/// the fraction of |θ̃ − θ†| / se > 1.95996.
ReplicationSummary summarize(const std::vector<ParamVector>& theta_tilde,
                             const ParamVector& theta_dagger,
                             const std::vector<Eigen::VectorXd>& std_errs);

struct ReplicationRecord {
  int replication = 0;
  std::string method;  // "sgn" or "baseline"
  bool ok = false;
  std::string error;
  ParamVector estimate;
  std::optional<Eigen::VectorXd> std_err;
  double obj_norm = 0.0;
  int iterations = 0;
  bool chi2_pass = false;
};

struct MethodSummary {
  std::string method;
  ReplicationSummary summary;
};

struct ExperimentResult {
  ParamVector theta_dagger;
  std::vector<ReplicationRecord> records;  // ordered by (replication, method)
  std::vector<MethodSummary> summaries;
};

/// Run all replications (on `workers` threads) and summarize each method.
/// Results do not depend on `workers`. Throws ExperimentError when every
/// replication of the main method failed.
ExperimentResult run_replications(const ExperimentSpec& spec, int workers = 1);

/// Summaries recomputed from per-replication records.
std::vector<MethodSummary> summarize_records(const std::vector<ReplicationRecord>& records,
                                             const ParamVector& theta_dagger);

void write_replications_csv(std::ostream& out, const ExperimentResult& result);
void write_summary_csv(std::ostream& out, const ExperimentResult& result);
/// Parse a replications CSV back into records.
std::vector<ReplicationRecord> read_replications_csv(std::istream& in);

}  // namespace sgn
