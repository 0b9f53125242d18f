#include <doctest.h>

#include <random>

#include "sgn/covering.hpp"
#include "test_util.hpp"

using namespace sgn;
using namespace sgn::testing;

TEST_CASE("Halton in one dimension") {
  CoveringSequence seq(ParamBox::cube(1, 0, 1), {CoveringKind::Halton});
  for (double expected : {0.5, 0.25, 0.75, 0.125}) CHECK(seq.next_point()[0] == expected);
  CHECK(seq.index() == 4);
  CHECK(radical_inverse(5, 3) == doctest::Approx(7.0 / 9.0));
  CHECK(first_primes(6) == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13});
}

TEST_CASE("Sobol in one dimension") {
  CoveringSequence seq(ParamBox::cube(1, 0, 1));
  for (double expected : {0.5, 0.75, 0.25, 0.375}) CHECK(seq.next_point()[0] == expected);
  CoveringOptions unskipped;
  unskipped.skip_first = false;
  CoveringSequence raw(ParamBox::cube(1, 0, 1), unskipped);
  CHECK(raw.next_point()[0] == 0.0);
  CHECK(raw.next_point()[0] == 0.5);
}

TEST_CASE("Sobol matches published test vectors") {
  const SobolTable table(6);
  const std::vector<std::pair<std::uint64_t, std::vector<double>>> expected{
      {1, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}},
      {2, {0.75, 0.25, 0.25, 0.25, 0.75, 0.75}},
      {3, {0.25, 0.75, 0.75, 0.75, 0.25, 0.25}},
      {5, {0.875, 0.875, 0.125, 0.375, 0.875, 0.625}},
      {9, {0.6875, 0.8125, 0.4375, 0.9375, 0.0625, 0.8125}},
      {13, {0.8125, 0.6875, 0.8125, 0.0625, 0.4375, 0.9375}}};
  for (const auto& [k, v] : expected) {
    const Eigen::VectorXd p = table.point(k);
    for (int j = 0; j < 6; ++j) CHECK(p[j] == v[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("Sobol covers the full direction-number table") {
  CHECK(sobol_max_dim() == 21201);
  const SobolTable table(21201);
  const std::vector<double> last{0.5, 0.75, 0.25, 0.625, 0.125, 0.375, 0.875};
  const std::vector<double> col1000{0.5, 0.25, 0.75, 0.875, 0.375, 0.625, 0.125};
  for (std::uint64_t k = 1; k <= 7; ++k) {
    const Eigen::VectorXd p = table.point(k);
    CHECK(p[21200] == last[k - 1]);
    CHECK(p[1000] == col1000[k - 1]);
  }
  CHECK_THROWS_AS(SobolTable(21202), ConfigError);
  CHECK_THROWS_AS(CoveringSequence(ParamBox::cube(21202, 0, 1)), ConfigError);
  CHECK_NOTHROW(CoveringSequence(ParamBox::cube(21202, 0, 1), {CoveringKind::Halton}));
}

TEST_CASE("points lie in the box and sequences are deterministic") {
  const ParamBox box = ParamBox::cube(4, -2, 3);
  for (auto kind : {CoveringKind::Sobol, CoveringKind::Halton, CoveringKind::UniformRandom}) {
    CoveringOptions opts;
    opts.kind = kind;
    opts.seed = 12;
    CoveringSequence a(box, opts), b(box, opts);
    for (int k = 0; k < 300; ++k) {
      const Eigen::VectorXd p = a.next_point();
      CHECK(box.contains(p));
      CHECK(p == b.next_point());
      CHECK(p == a.point(static_cast<std::uint64_t>(k)));
    }
  }
  CoveringOptions u1{CoveringKind::UniformRandom, true, {}, 1}, u2{CoveringKind::UniformRandom, true, {}, 2};
  CHECK(CoveringSequence(box, u1).next_point() != CoveringSequence(box, u2).next_point());
}

TEST_CASE("digital shift randomizes Sobol reproducibly") {
  const ParamBox box = ParamBox::cube(2, 0, 1);
  CoveringOptions a, b, c;
  a.digital_shift_seed = 5;
  b.digital_shift_seed = 5;
  c.digital_shift_seed = 6;
  CoveringSequence sa(box, a), sb(box, b), sc(box, c), plain(box);
  const Eigen::VectorXd pa = sa.next_point();
  CHECK(pa == sb.next_point());
  CHECK(pa != sc.next_point());
  CHECK(pa != plain.next_point());
  // A digital shift keeps the stratification: 2^m consecutive points still
  // fall one per dyadic interval along each axis.
  std::vector<int> hits(16, 0);
  CoveringOptions unskipped = a;
  unskipped.skip_first = false;
  CoveringSequence s(box, unskipped);
  for (int k = 0; k < 16; ++k) ++hits[static_cast<std::size_t>(s.next_point()[0] * 16)];
  for (int h : hits) CHECK(h == 1);
}

TEST_CASE("covering kind names") {
  CHECK(covering_kind_from_string("sobol") == CoveringKind::Sobol);
  CHECK(covering_kind_from_string("halton") == CoveringKind::Halton);
  CHECK(covering_kind_from_string("uniform") == CoveringKind::UniformRandom);
  CHECK_THROWS_AS(covering_kind_from_string("lattice"), ConfigError);
  CHECK(std::string(to_string(CoveringKind::Halton)) == "halton");
}

TEST_CASE("discrepancy examples") {
  const ParamBox unit = ParamBox::cube(1, 0, 1);
  const auto probes = grid_probes(unit, 1001);
  const double spacing = 1e-3;
  CHECK(discrepancy({vec({0.5})}, probes) == doctest::Approx(0.5).epsilon(spacing));
  CHECK(std::fabs(discrepancy({vec({0.0}), vec({1.0})}, probes) - 0.5) <= spacing);
  CHECK(discrepancy(probes, probes) == 0.0);
  CHECK_THROWS_AS(discrepancy({}, probes), ContractError);
  CHECK_THROWS_AS(discrepancy(probes, {}), ContractError);
}

TEST_CASE("discrepancy is non-increasing in the number of points") {
  const ParamBox box = ParamBox::cube(2, 0, 1);
  const auto probes = sobol_probes(box, 4096);
  CoveringSequence seq(box, {CoveringKind::Halton});
  std::vector<ParamVector> pts;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    pts.push_back(seq.next_point());
    const double d = discrepancy(pts, probes);
    CHECK(d <= prev);
    prev = d;
  }
}

TEST_CASE("serial and parallel discrepancy agree exactly") {
  const ParamBox box = ParamBox::cube(3, -1, 2);
  CoveringSequence seq(box);
  std::vector<ParamVector> pts;
  for (int k = 0; k < 100; ++k) pts.push_back(seq.next_point());
  const auto probes = sobol_probes(box, 3000);
  CHECK(discrepancy(pts, probes, Execution::Serial) == discrepancy(pts, probes, Execution::Parallel));
}

TEST_CASE("probe sets") {
  const ParamBox box(vec({0, -1}), vec({2, 1}));
  const auto grid = grid_probes(box, 3);
  CHECK(grid.size() == 9);
  CHECK(grid.front() == box.lower());
  CHECK(grid.back() == box.upper());
  const auto sob = sobol_probes(box, 64);
  CHECK(sob.size() == 64);
  CHECK(sob.front() == box.lower());
}
