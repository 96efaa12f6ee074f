#include "cobra/rank_stats.hpp"

#include <cmath>
#include <numeric>

namespace cobra::stats {

namespace {

constexpr double kTieTolerance = 1e-12;

double median_of_sorted(std::span<const double> sorted) {
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

std::vector<double> centered(std::vector<double> ranks) {
  const double mean = std::accumulate(ranks.begin(), ranks.end(), 0.0) / static_cast<double>(ranks.size());
  for (auto& r : ranks) r -= mean;
  return ranks;
}

double sum_squares(const std::vector<double>& v) { return std::inner_product(v.begin(), v.end(), v.begin(), 0.0); }

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) return std::nullopt;
  const auto rx = centered(midranks(x));
  const auto ry = centered(midranks(y));
  const double sxx = sum_squares(rx);
  const double syy = sum_squares(ry);
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::inner_product(rx.begin(), rx.end(), ry.begin(), 0.0) / std::sqrt(sxx * syy);
}

CorrelationTest spearman_test(std::span<const double> x, std::span<const double> y, const PermutationOptions& options) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  CorrelationTest result;
  if (x.size() < 2) return result;
  const auto rx = centered(midranks(x));
  const auto ry = centered(midranks(y));
  const double norm = std::sqrt(sum_squares(rx) * sum_squares(ry));
  if (norm == 0.0) return result;

  const std::size_t n = rx.size();
  auto correlation = [&](const std::vector<std::size_t>& perm) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += rx[i] * ry[perm[i]];
    return s / norm;
  };

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  const double observed = correlation(perm);
  const double threshold = std::abs(observed) - kTieTolerance;
  result.rho = observed;

  std::uint64_t hits = 0;
  if (n <= options.exhaustive_limit) {
    std::uint64_t total = 0;
    do {
      ++total;
      if (std::abs(correlation(perm)) >= threshold) ++hits;
    } while (std::next_permutation(perm.begin(), perm.end()));
    result.exact = true;
    result.permutations = total;
    result.p_value = static_cast<double>(hits) / static_cast<double>(total);
    return result;
  }

  UniformStream stream(options.seed);
  for (std::size_t b = 0; b < options.permutations; ++b) {
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[stream.below(i)]);
    if (std::abs(correlation(perm)) >= threshold) ++hits;
  }
  result.permutations = options.permutations;
  result.p_value = static_cast<double>(hits + 1) / static_cast<double>(options.permutations + 1);
  return result;
}

RankSumTest rank_sum_test(std::span<const double> first, std::span<const double> second) {
  const std::size_t n1 = first.size();
  const std::size_t n = n1 + second.size();
  if (n1 == 0 || second.empty()) throw std::invalid_argument("rank-sum test needs two nonempty groups");

  std::vector<double> pooled(first.begin(), first.end());
  pooled.insert(pooled.end(), second.begin(), second.end());
  const auto ranks = midranks(pooled);

  RankSumTest result;
  result.statistic = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n1), 0.0);
  result.expected = static_cast<double>(n1) * static_cast<double>(n + 1) / 2.0;
  const double observed = std::abs(result.statistic - result.expected) - 1e-9;

  if (n <= 20) {
    // walk all n1-subsets of {0..n-1} in lexicographic order
    std::vector<std::size_t> pick(n1);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    std::uint64_t total = 0;
    std::uint64_t hits = 0;
    while (true) {
      double w = 0.0;
      for (auto idx : pick) w += ranks[idx];
      ++total;
      if (std::abs(w - result.expected) >= observed) ++hits;
      std::size_t i = n1;
      while (i > 0 && pick[i - 1] == n - n1 + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < n1; ++j) pick[j] = pick[j - 1] + 1;
    }
    result.assignments = total;
    result.p_value = static_cast<double>(hits) / static_cast<double>(total);
    return result;
  }

  // Midranks are multiples of 1/2, so doubled rank sums are integers.
  std::vector<std::size_t> doubled(n);
  std::size_t max_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
    max_sum += doubled[i];
  }
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = std::min(i + 1, n1); k >= 1; --k) {
      for (std::size_t s = max_sum; s >= doubled[i]; --s) ways[k][s] += ways[k - 1][s - doubled[i]];
    }
  }
  double total = 0.0;
  double hits = 0.0;
  for (std::size_t s = 0; s <= max_sum; ++s) {
    total += ways[n1][s];
    if (std::abs(static_cast<double>(s) / 2.0 - result.expected) >= observed) hits += ways[n1][s];
  }
  result.assignments = static_cast<std::uint64_t>(total);
  result.p_value = hits / total;
  return result;
}

TukeyFences tukey_fences(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("tukey fences of empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::size_t half = (n + 1) / 2;
  const std::span<const double> all(sorted);
  TukeyFences f;
  f.lower_hinge = median_of_sorted(all.first(half));
  f.upper_hinge = median_of_sorted(all.last(half));
  const double spread = f.upper_hinge - f.lower_hinge;
  f.lower_fence = f.lower_hinge - 1.5 * spread;
  f.upper_fence = f.upper_hinge + 1.5 * spread;
  return f;
}

}  // namespace cobra::stats
