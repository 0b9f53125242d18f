#include "sgn/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "sgn/rng.hpp"

namespace sgn {

namespace detail {
extern const std::uint32_t kJoeKuoRows;
extern const std::uint8_t kJoeKuoDegree[];
extern const std::uint32_t kJoeKuoPoly[];
extern const std::uint32_t kJoeKuoOffset[];
extern const std::uint32_t kJoeKuoM[];
}  // namespace detail

const char* to_string(CoveringKind kind) {
  switch (kind) {
    case CoveringKind::Sobol: return "sobol";
    case CoveringKind::Halton: return "halton";
    case CoveringKind::UniformRandom: return "uniform";
  }
  return "unknown";
}

CoveringKind covering_kind_from_string(const std::string& name) {
  if (name == "sobol") return CoveringKind::Sobol;
  if (name == "halton") return CoveringKind::Halton;
  if (name == "uniform") return CoveringKind::UniformRandom;
  throw ConfigError("unknown covering sequence '" + name + "' (expected sobol, halton or uniform)");
}

Eigen::Index sobol_max_dim() { return static_cast<Eigen::Index>(detail::kJoeKuoRows) + 1; }

SobolTable::SobolTable(Eigen::Index dim, std::optional<std::uint64_t> digital_shift_seed) {
  if (dim < 1 || dim > sobol_max_dim())
    throw ConfigError("Sobol: dimension " + std::to_string(dim) + " outside [1, " +
                      std::to_string(sobol_max_dim()) + "]");
  directions_.resize(static_cast<std::size_t>(dim));
  for (int j = 0; j < 32; ++j) directions_[0][j] = 1u << (31 - j);
  for (Eigen::Index k = 1; k < dim; ++k) {
    const auto row = static_cast<std::size_t>(k - 1);
    const int s = detail::kJoeKuoDegree[row];
    const std::uint32_t a = detail::kJoeKuoPoly[row];
    const std::uint32_t* m = detail::kJoeKuoM + detail::kJoeKuoOffset[row];
    auto& v = directions_[static_cast<std::size_t>(k)];
    for (int j = 0; j < 32; ++j) {
      if (j < s) {
        v[j] = m[j] << (31 - j);
      } else {
        std::uint32_t x = v[j - s] ^ (v[j - s] >> s);
        for (int i = 1; i < s; ++i) x ^= ((a >> (s - 1 - i)) & 1u) * v[j - i];
        v[j] = x;
      }
    }
  }
  shift_.assign(static_cast<std::size_t>(dim), 0u);
  if (digital_shift_seed) {
    std::mt19937_64 engine(derive_seed(*digital_shift_seed, {tag(StreamTag::kCovering)}));
    for (auto& s : shift_) s = static_cast<std::uint32_t>(engine() >> 32);
  }
}

Eigen::VectorXd SobolTable::point(std::uint64_t k) const {
  if (k > std::numeric_limits<std::uint32_t>::max())
    throw ConfigError("Sobol: index exceeds 2^32 - 1");
  const std::uint64_t gray = k ^ (k >> 1);
  Eigen::VectorXd x(dim());
  for (std::size_t d = 0; d < directions_.size(); ++d) {
    std::uint32_t bits = shift_[d];
    for (int j = 0; j < 32 && (gray >> j) != 0; ++j)
      if ((gray >> j) & 1u) bits ^= directions_[d][j];
    x[static_cast<Eigen::Index>(d)] = std::ldexp(static_cast<double>(bits), -32);
  }
  return x;
}

double radical_inverse(std::uint64_t k, std::uint32_t base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> primes;
  primes.reserve(count);
  for (std::uint32_t c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (std::uint32_t p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

namespace {

Eigen::VectorXd uniform_point(std::uint64_t seed, Eigen::Index dim, std::uint64_t k) {
  std::mt19937_64 engine(derive_seed(seed, {tag(StreamTag::kCovering), k}));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = u(engine);
  return x;
}

Eigen::VectorXd halton_point(const std::vector<std::uint32_t>& primes, std::uint64_t k) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(primes.size()));
  for (std::size_t i = 0; i < primes.size(); ++i)
    x[static_cast<Eigen::Index>(i)] = radical_inverse(k, primes[i]);
  return x;
}

}  // namespace

Eigen::VectorXd unit_point(const CoveringOptions& opts, Eigen::Index dim, std::uint64_t k) {
  if (dim < 1) throw ConfigError("covering: dimension must be >= 1");
  switch (opts.kind) {
    case CoveringKind::Sobol: return SobolTable(dim, opts.digital_shift_seed).point(k);
    case CoveringKind::Halton: return halton_point(first_primes(static_cast<std::size_t>(dim)), k);
    case CoveringKind::UniformRandom: return uniform_point(opts.seed, dim, k);
  }
  throw ConfigError("covering: unknown kind");
}

CoveringSequence::CoveringSequence(ParamBox box, CoveringOptions opts)
    : box_(std::move(box)), opts_(opts) {
  if (opts_.kind == CoveringKind::Sobol) sobol_.emplace(box_.dim(), opts_.digital_shift_seed);
  if (opts_.kind == CoveringKind::Halton) primes_ = first_primes(static_cast<std::size_t>(box_.dim()));
}

ParamVector CoveringSequence::point(std::uint64_t position) const {
  const std::uint64_t k = position + (opts_.skip_first ? 1 : 0);
  Eigen::VectorXd u;
  switch (opts_.kind) {
    case CoveringKind::Sobol: u = sobol_->point(k); break;
    case CoveringKind::Halton: u = halton_point(primes_, k); break;
    case CoveringKind::UniformRandom: u = uniform_point(opts_.seed, box_.dim(), k); break;
  }
  return box_.from_unit(u);
}

ParamVector CoveringSequence::next_point() { return point(index_++); }

double discrepancy(const std::vector<ParamVector>& points, const std::vector<ParamVector>& probes,
                   Execution exec) {
  if (points.empty()) throw ContractError("discrepancy: empty point set");
  if (probes.empty()) throw ContractError("discrepancy: empty probe set");
  const Eigen::Index d = points.front().size();
  for (const auto& p : points)
    if (p.size() != d) throw ContractError("discrepancy: inconsistent point dimensions");
  for (const auto& q : probes)
    if (q.size() != d) throw ContractError("discrepancy: probe dimension mismatch");

  auto nearest_sq = [&](const ParamVector& q) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::min(best, (q - p).squaredNorm());
    return best;
  };

  double worst = 0.0;
  const auto n = static_cast<long long>(probes.size());
  if (exec == Execution::Serial) {
    for (long long i = 0; i < n; ++i) worst = std::max(worst, nearest_sq(probes[static_cast<std::size_t>(i)]));
  } else {
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (long long i = 0; i < n; ++i) worst = std::max(worst, nearest_sq(probes[static_cast<std::size_t>(i)]));
  }
  return std::sqrt(worst);
}

std::vector<ParamVector> sobol_probes(const ParamBox& box, std::size_t count) {
  CoveringSequence seq(box, CoveringOptions{CoveringKind::Sobol, false, std::nullopt, 0});
  std::vector<ParamVector> probes;
  probes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) probes.push_back(seq.next_point());
  return probes;
}

std::vector<ParamVector> grid_probes(const ParamBox& box, std::size_t per_axis) {
  if (per_axis < 2) throw ContractError("grid_probes: need at least 2 points per axis");
  const Eigen::Index d = box.dim();
  std::size_t total = 1;
  for (Eigen::Index i = 0; i < d; ++i) total *= per_axis;
  std::vector<ParamVector> probes;
  probes.reserve(total);
  Eigen::VectorXd u(d);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (Eigen::Index i = 0; i < d; ++i) {
      u[i] = static_cast<double>(rem % per_axis) / static_cast<double>(per_axis - 1);
      rem /= per_axis;
    }
    probes.push_back(box.from_unit(u));
  }
  return probes;
}

}  // namespace sgn
