#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace waitlist {

/// Seeded generator whose every output is fixed by the C++ standard
/// (mt19937_64) plus hand-written transforms, so a seed reproduces the
/// same stream on any platform and standard library.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64 (splitmix64 substreams, rejection-sampled integers, Marsaglia polar normals)";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for the index-th independent substream of a master seed.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept;

}  // namespace waitlist
