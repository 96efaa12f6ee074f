#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cobra {

/// Master seed of a simulation. Sub-streams are pure functions of the master
/// seed and a stable label, so parallel or reordered evaluation never changes results.
struct RandomSeed {
  std::uint64_t master = 0;

  RandomSeed derive(std::uint64_t label) const;
  RandomSeed derive(std::string_view label) const;

  bool operator==(const RandomSeed&) const = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Platform-stable uniform generator (std distributions are implementation-defined).
class UniformStream {
 public:
  explicit UniformStream(RandomSeed seed);

  /// Uniform double in [0, 1) with 53 random bits.
  double next();

  /// Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

}  // namespace cobra
