#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace sgn {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hash a seed together with a path of counters (iteration, draw index, role, ...)
/// into an independent child seed. Distinct paths give unrelated streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t k : path) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

/// Stream tags so that call sites sharing one solver seed never collide.
enum class StreamTag : std::uint64_t {
  kMcJacobian = 1,
  kQnInit = 2,
  kQnUpdate = 3,
  kCovering = 4,
  kSmoothingDraws = 5,
};

constexpr std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

/// Standard-normal vector generator over one derived seed.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double draw() { return dist_(engine_); }

  Eigen::VectorXd vector(Eigen::Index dim) {
    Eigen::VectorXd z(dim);
    for (Eigen::Index i = 0; i < dim; ++i) z[i] = dist_(engine_);
    return z;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> dist_;
};

}  // namespace sgn
