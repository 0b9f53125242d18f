#include <doctest.h>

#include <sstream>

#include "sgn/harness.hpp"
#include "test_util.hpp"

using namespace sgn;
using namespace sgn::testing;

namespace {

ExperimentSpec quantile_spec(int reps) {
  const nlohmann::json j = {
      {"problem", {{"kind", "quantile"}, {"n", 100}, {"t", 0.7}}},
      {"solver", {{"gamma", 0.1}, {"eps", 0.2}, {"b_max", 60}, {"theta0", 0.0},
                  {"covering", nullptr}, {"jacobian", {{"mode", "closed_form"}}}}},
      {"baseline", {{"gamma", 0.1}, {"eps", 0.2}, {"b_max", 60}, {"theta0", 0.0},
                    {"covering", nullptr}, {"jacobian", {{"mode", "closed_form"}}}}},
      {"replications", reps},
      {"master_seed", 17}};
  return experiment_spec_from_json(j);
}

std::string summary_csv(const ExperimentResult& r) {
  std::ostringstream out;
  write_summary_csv(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("summarize examples") {
  const ParamVector truth = vec({0.5, -1.0});
  const auto exact = summarize({truth, truth, truth}, truth, {vec({0.1, 0.1}), vec({0.1, 0.1}), vec({0.1, 0.1})});
  for (const auto& c : exact.coefficients) {
    CHECK(c.bias == 0.0);
    CHECK(c.mae == 0.0);
    CHECK(c.std == 0.0);
    CHECK(*c.size == 0.0);
  }
  const auto spread = summarize({vec({1.5}), vec({-0.5})}, vec({0.5}), {vec({0.1}), vec({0.1})});
  CHECK(spread.coefficients[0].bias == 0.0);
  CHECK(spread.coefficients[0].mae == 1.0);
  CHECK(*spread.coefficients[0].size == 1.0);
  CHECK(spread.coefficients[0].std == doctest::Approx(std::sqrt(2.0)));
  CHECK_FALSE(summarize({vec({1.0})}, vec({0.0}), {}).coefficients[0].size.has_value());
  CHECK_THROWS_AS(summarize({}, vec({0.0}), {}), ContractError);
}

TEST_CASE("replications are deterministic and independent of the worker count") {
  const auto spec = quantile_spec(24);
  const auto a = run_replications(spec, 1);
  const auto b = run_replications(spec, 1);
  const auto c = run_replications(spec, 4);
  CHECK(summary_csv(a) == summary_csv(b));
  CHECK(summary_csv(a) == summary_csv(c));
  REQUIRE(a.summaries.size() == 2);
  CHECK(a.summaries[0].method == "sgn");
  CHECK(a.summaries[1].method == "baseline");
  CHECK(a.summaries[0].summary.count == 24);
  CHECK(a.theta_dagger[0] == doctest::Approx(0.5244).epsilon(1e-3));
  CHECK(a.summaries[0].summary.coefficients[0].size.has_value());
}

TEST_CASE("seed isolation") {
  const auto long_run = run_replications(quantile_spec(40), 2);
  const auto short_run = run_replications(quantile_spec(20), 1);
  for (std::size_t i = 0; i < short_run.records.size(); ++i) {
    CHECK(short_run.records[i].replication == long_run.records[i].replication);
    CHECK(short_run.records[i].estimate == long_run.records[i].estimate);
  }
  auto other = quantile_spec(20);
  other.master_seed = 18;
  const auto moved = run_replications(other, 1);
  CHECK(moved.records[0].estimate != short_run.records[0].estimate);
  std::ostringstream h1, h2;
  write_summary_csv(h1, moved);
  write_summary_csv(h2, short_run);
  CHECK(h1.str().substr(0, h1.str().find('\n')) == h2.str().substr(0, h2.str().find('\n')));
}

TEST_CASE("summary equals a recomputation from the replications csv") {
  const auto res = run_replications(quantile_spec(15), 1);
  std::stringstream ss;
  write_replications_csv(ss, res);
  const auto records = read_replications_csv(ss);
  REQUIRE(records.size() == res.records.size());
  ExperimentResult again;
  again.theta_dagger = res.theta_dagger;
  again.summaries = summarize_records(records, res.theta_dagger);
  CHECK(summary_csv(again) == summary_csv(res));
}

TEST_CASE("failed replications are recorded and all-failed raises") {
  nlohmann::json j = {{"problem", {{"kind", "quantile"}, {"n", 0}}},
                      {"solver", {{"eps", 0.1}, {"jacobian", {{"mode", "closed_form"}}}}},
                      {"replications", 3}};
  CHECK_THROWS_AS(run_replications(experiment_spec_from_json(j), 1), ExperimentError);
}

TEST_CASE("other problem kinds run through the harness") {
  for (const char* kind : {"quantreg", "toy", "ddc"}) {
    nlohmann::json problem = {{"kind", kind}};
    if (std::string(kind) == "ddc") problem.update({{"n", 60}, {"T", 4}, {"beta_dim", 3}});
    nlohmann::json j = {{"problem", problem},
                        {"solver", {{"eps", 0.1}, {"b_max", 20}}},
                        {"replications", 2}};
    const auto res = run_replications(experiment_spec_from_json(j), 2);
    CHECK(res.summaries.size() == 1);
    CHECK(res.summaries[0].summary.count + res.summaries[0].summary.errors == 2);
    CHECK_FALSE(res.summaries[0].summary.coefficients.at(0).size.has_value());
  }
}

TEST_CASE("spec json round trip and validation") {
  const auto spec = quantile_spec(5);
  const auto back = experiment_spec_from_json(experiment_spec_to_json(spec));
  CHECK(experiment_spec_to_json(back) == experiment_spec_to_json(spec));
  nlohmann::json bad = {{"problem", {{"kind", "quantile"}}}, {"replications", 0}};
  CHECK_THROWS_AS(experiment_spec_from_json(bad), ConfigError);
  bad = {{"problem", {{"kind", "nope"}}}};
  CHECK_THROWS_AS(experiment_spec_from_json(bad), ConfigError);
  bad = {{"problem", {{"kind", "quantile"}}}, {"solver", {{"gamma", 2.0}}}};
  CHECK_THROWS_AS(experiment_spec_from_json(bad), ConfigError);
  bad = {{"problem", {{"kind", "quantile"}}}, {"solver", {{"jacobian", {{"mode", "exact"}}}}}};
  CHECK_THROWS_AS(experiment_spec_from_json(bad), ConfigError);
  nlohmann::json opt = {{"problem", {{"kind", "quantile"}}}, {"solver", {{"gamma", 0.1}, {"alpha", "optimal"}}}};
  CHECK(experiment_spec_from_json(opt).solver.alpha == doctest::Approx(0.467).epsilon(0.01));
  CHECK_THROWS_AS(load_experiment_spec("/nonexistent/spec.json"), ConfigError);
  CHECK(child_seed(1, 0, SeedRole::Data) != child_seed(1, 0, SeedRole::Sim));
  CHECK(child_seed(1, 0, SeedRole::Data) != child_seed(1, 1, SeedRole::Data));
}
