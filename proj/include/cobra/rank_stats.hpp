#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "cobra/random.hpp"

// Rank-based statistics with exact small-sample p-values.
namespace cobra::stats {

/// 1-based ranks, tied values share the mean of their positions.
std::vector<double> midranks(std::span<const double> values);

/// Spearman's rho (Pearson correlation of midranks); nullopt when either side is constant.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

struct PermutationOptions {
  std::size_t exhaustive_limit = 8;  // enumerate all n! orderings up to this n
  std::size_t permutations = 10000;  // Monte Carlo resamples above it
  RandomSeed seed;
};

struct CorrelationTest {
  std::optional<double> rho;
  double p_value = 1.0;  // two-sided
  bool exact = false;
  std::uint64_t permutations = 0;
};

/// Two-sided permutation test of Spearman's rho. Exhaustive for small n;
/// otherwise (1 + hits) / (1 + permutations) over seeded shuffles.
CorrelationTest spearman_test(std::span<const double> x, std::span<const double> y,
                              const PermutationOptions& options = {});

struct RankSumTest {
  double statistic = 0.0;  // midrank sum of the first group
  double expected = 0.0;
  double p_value = 1.0;  // exact, two-sided
  std::uint64_t assignments = 0;
};

/// Exact Mann-Whitney rank-sum test by enumeration of all C(n, n1) group
/// assignments (counting by rank-sum distribution above 20 observations).
RankSumTest rank_sum_test(std::span<const double> first, std::span<const double> second);

struct TukeyFences {
  double lower_hinge = 0.0;
  double upper_hinge = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
};

/// Tukey hinges (medians of the lower and upper halves; halves share the
/// median when n is odd) with fences at hinge -/+ 1.5 * (upper - lower hinge).
TukeyFences tukey_fences(std::span<const double> values);

/// Element at index (n - 1) / 2 of the sorted values.
template <typename T>
T lower_median(std::vector<T> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace cobra::stats
