#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cobra/rank_stats.hpp"

using namespace cobra;
using namespace cobra::stats;

namespace {

// Rank-sum p by enumerating bitmasks over the pooled sample.
double bitmask_rank_sum_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto r = midranks(pooled);
  const std::size_t n = pooled.size();
  const double expected = a.size() * (n + 1) / 2.0;
  const double observed = std::abs(std::accumulate(r.begin(), r.begin() + a.size(), 0.0) - expected);
  std::size_t total = 0;
  std::size_t hits = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != a.size()) continue;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1u) s += r[i];
    }
    ++total;
    if (std::abs(s - expected) >= observed - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

TEST_SUITE("rank_stats") {
  TEST_CASE("midranks share tied positions") {
    const std::vector<double> v{3, 1, 3, 2, 3};
    CHECK(midranks(v) == std::vector<double>{4, 1, 4, 2, 4});
  }

  TEST_CASE("spearman of monotone and reversed data") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{0.1, 0.2, 0.3, 0.4};
    const std::vector<double> z{0.4, 0.3, 0.2, 0.1};
    CHECK(*spearman(x, y) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(*spearman(x, z) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_FALSE(spearman(x, std::vector<double>{5, 5, 5, 5}).has_value());
  }

  TEST_CASE("exact permutation p for n = 4 monotone data is 2/24") {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{0.1, 0.2, 0.3, 0.4};
    const auto t = spearman_test(x, y);
    CHECK(t.exact);
    CHECK(t.permutations == 24);
    CHECK(t.p_value == 2.0 / 24.0);
    CHECK(spearman_test(x, y).p_value == t.p_value);
  }

  TEST_CASE("exact p matches an independent enumeration with ties") {
    const std::vector<double> x{1, 2, 2, 3, 4, 4};
    const std::vector<double> y{0.3, 0.1, 0.5, 0.4, 0.9, 0.6};
    const double rho = *spearman(x, y);
    std::vector<double> perm = y;
    std::sort(perm.begin(), perm.end());
    // y has no ties, so distinct value orderings are exactly the permutations
    std::size_t total = 0;
    std::size_t hits = 0;
    do {
      ++total;
      if (std::abs(*spearman(x, perm)) >= std::abs(rho) - 1e-12) ++hits;
    } while (std::next_permutation(perm.begin(), perm.end()));
    CHECK(spearman_test(x, y).p_value == static_cast<double>(hits) / static_cast<double>(total));
  }

  TEST_CASE("Monte Carlo p above the exhaustive limit is seeded and bounded") {
    std::vector<double> x(12);
    std::vector<double> y(12);
    for (int i = 0; i < 12; ++i) {
      x[i] = i;
      y[i] = (i * 7) % 12;
    }
    PermutationOptions o{8, 2000, RandomSeed{4}};
    const auto t = spearman_test(x, y, o);
    CHECK_FALSE(t.exact);
    CHECK(t.p_value > 0.0);
    CHECK(t.p_value <= 1.0);
    CHECK(spearman_test(x, y, o).p_value == t.p_value);

    std::vector<double> mono(12);
    std::iota(mono.begin(), mono.end(), 0.0);
    CHECK(spearman_test(x, mono, o).p_value == 1.0 / 2001.0);
  }

  TEST_CASE("rank-sum p for {10,11,12} vs {5,6,7,8} is 2/35") {
    const std::vector<double> a{10, 11, 12};
    const std::vector<double> b{5, 6, 7, 8};
    const auto t = rank_sum_test(a, b);
    CHECK(t.assignments == 35);
    CHECK(t.statistic == 18.0);
    CHECK(t.p_value == 2.0 / 35.0);
  }

  TEST_CASE("rank-sum without separation") {
    CHECK(rank_sum_test(std::vector<double>{1, 4, 5, 8}, std::vector<double>{2, 3, 6, 7}).p_value == 1.0);
    CHECK(rank_sum_test(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}).p_value == 1.0);
  }

  TEST_CASE("rank-sum agrees with bitmask enumeration") {
    UniformStream rng(RandomSeed{31});
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<double> a(1 + rng.below(6));
      std::vector<double> b(1 + rng.below(7));
      for (auto& v : a) v = static_cast<double>(rng.below(6));
      for (auto& v : b) v = static_cast<double>(rng.below(6));
      CHECK(rank_sum_test(a, b).p_value == doctest::Approx(bitmask_rank_sum_p(a, b)).epsilon(1e-12));
    }
  }

  TEST_CASE("rank-sum beyond enumeration size stays consistent") {
    // 24 observations use the counting path; a perfect split is the most extreme outcome
    std::vector<double> a(12);
    std::vector<double> b(12);
    std::iota(a.begin(), a.end(), 0.0);
    std::iota(b.begin(), b.end(), 100.0);
    const auto t = rank_sum_test(a, b);
    CHECK(t.p_value == doctest::Approx(2.0 / 2704156.0).epsilon(1e-12));
  }

  TEST_CASE("Tukey fences") {
    const auto f = tukey_fences(std::vector<double>{10, 10, 10, 11, 50});
    CHECK(f.lower_hinge == 10);
    CHECK(f.upper_hinge == 11);
    CHECK(f.upper_fence == 12.5);
    CHECK(f.lower_fence == 8.5);

    const auto even = tukey_fences(std::vector<double>{1, 2, 3, 4, 5, 6});
    CHECK(even.lower_hinge == 2);
    CHECK(even.upper_hinge == 5);
  }

  TEST_CASE("lower median") {
    CHECK(lower_median(std::vector<int>{0, 3}) == 0);
    CHECK(lower_median(std::vector<int>{3, 1, 1}) == 1);
    CHECK_THROWS(lower_median(std::vector<int>{}));
  }
}
