#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgn/kernels.hpp"
#include "sgn/moments.hpp"

namespace sgn {

enum class CoveringKind { Sobol, Halton, UniformRandom };

const char* to_string(CoveringKind kind);
CoveringKind covering_kind_from_string(const std::string& name);

/// Largest dimension covered by the embedded Joe-Kuo direction numbers.
Eigen::Index sobol_max_dim();

struct CoveringOptions {
  CoveringKind kind = CoveringKind::Sobol;
  /// Skip index 0 (the all-zeros corner for Sobol, also 0 for Halton).
  bool skip_first = true;
  /// Seeded digital shift for a randomized Sobol sequence.
  std::optional<std::uint64_t> digital_shift_seed;
  /// Seed of the UniformRandom sequence.
  std::uint64_t seed = 0;
};

/// Sobol points in Gray-code order using the Joe-Kuo new direction numbers.
class SobolTable {
 public:
  explicit SobolTable(Eigen::Index dim, std::optional<std::uint64_t> digital_shift_seed = {});

  Eigen::Index dim() const { return static_cast<Eigen::Index>(directions_.size()); }
  /// Point k in [0,1)^dim.
  Eigen::VectorXd point(std::uint64_t k) const;

 private:
  std::vector<std::array<std::uint32_t, 32>> directions_;
  std::vector<std::uint32_t> shift_;
};

/// Radical inverse of k in the given base.
double radical_inverse(std::uint64_t k, std::uint32_t base);

/// The first `count` primes.
std::vector<std::uint32_t> first_primes(std::size_t count);

/// Stateless access to point k of a unit-cube sequence (no skipping applied).
Eigen::VectorXd unit_point(const CoveringOptions& opts, Eigen::Index dim, std::uint64_t k);

/// Stateful covering sequence (θ^b) on a parameter box.
class CoveringSequence {
 public:
  CoveringSequence(ParamBox box, CoveringOptions opts = {});

  /// Point at the current index, then advance.
  ParamVector next_point();
  /// Point at sequence position `position` (0-based, after skipping) without advancing.
  ParamVector point(std::uint64_t position) const;

  std::uint64_t index() const { return index_; }
  const ParamBox& box() const { return box_; }
  const CoveringOptions& options() const { return opts_; }

 private:
  ParamBox box_;
  CoveringOptions opts_;
  std::optional<SobolTable> sobol_;
  std::vector<std::uint32_t> primes_;
  std::uint64_t index_ = 0;
};

/// max over probes of the Euclidean distance to the nearest point. Estimates the
/// covering discrepancy sup_θ min_ℓ ‖θ − θ^ℓ‖ from below.
double discrepancy(const std::vector<ParamVector>& points, const std::vector<ParamVector>& probes,
                   Execution exec = Execution::Parallel);

/// Sobol probe set on the box, including the corner point.
std::vector<ParamVector> sobol_probes(const ParamBox& box, std::size_t count = std::size_t{1} << 14);

/// Regular grid probe set with `per_axis` points per coordinate (endpoints included).
std::vector<ParamVector> grid_probes(const ParamBox& box, std::size_t per_axis);

}  // namespace sgn
