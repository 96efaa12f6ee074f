#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cobra/calibration.hpp"
#include "cobra/estimation.hpp"
#include "support.hpp"

using namespace cobra;
using cobra::test::interaction_model;
using cobra::test::one_factor_model;
using cobra::test::point;

namespace {

CostDistribution sorted_samples(std::vector<double> s) {
  std::sort(s.begin(), s.end());
  CostDistribution d;
  d.samples = std::move(s);
  return d;
}

// Definition by counting: smallest sample x with #{samples <= x} / N >= p.
double counting_quantile(const std::vector<double>& s, double p) {
  double best = INFINITY;
  for (double x : s) {
    const auto at_most = std::count_if(s.begin(), s.end(), [&](double y) { return y <= x; });
    if (static_cast<double>(at_most) / static_cast<double>(s.size()) >= p) best = std::min(best, x);
  }
  return best;
}

}  // namespace

TEST_SUITE("calibration") {
  TEST_CASE("mean overhead") {
    OverheadDistribution d;
    d.samples = {0.0, 0.0};
    CHECK(mean_overhead(d) == 0.0);
    d.samples = {0.1, 0.3};
    CHECK(mean_overhead(d) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(mean_overhead(simulate_overhead(one_factor_model(point(0.3)), {{"f", 3}}, {SampleMethod::latin_hypercube, 77},
                                          RandomSeed{1})) == doctest::Approx(0.3).epsilon(1e-15));
  }

  TEST_CASE("worked slope example") {
    const std::vector<CalibrationPoint> pts{{"A", 10, 25, 0.25}, {"B", 20, 50, 0.25}};
    const auto r = fit_nominal_productivity(pts);
    CHECK(r.regression_slope == 2.0);
    CHECK(r.nominal_productivity == 0.5);
    CHECK(r.residuals.at("A") == 0.0);
    CHECK(r.residuals.at("B") == 0.0);
  }

  TEST_CASE("single-rate noiseless data recovers the rate") {
    const double P = 0.37;
    std::vector<CalibrationPoint> pts;
    for (int i = 1; i <= 9; ++i) {
      const double size = 7.0 * i;
      const double co = 0.05 * i;
      pts.push_back({"p" + std::to_string(i), size, size / P * (1.0 + co), co});
    }
    const auto r = fit_nominal_productivity(pts);
    CHECK(std::abs(r.nominal_productivity - P) / P <= 1e-9);
    for (const auto& [id, res] : r.residuals) CHECK(std::abs(res) <= 1e-9);
  }

  TEST_CASE("per-project identity and unit coherence") {
    const std::vector<CalibrationPoint> pts{{"A", 12, 30, 0.1}, {"B", 40, 70, 0.4}, {"C", 25, 80, 0.2}};
    const auto r = fit_nominal_productivity(pts);
    for (const auto& p : pts) {
      CHECK(r.per_project_nominal.at(p.project_id) * p.effort ==
            doctest::Approx(p.size * (1.0 + p.mean_overhead)).epsilon(1e-14));
    }

    auto both = pts;
    for (auto& p : both) {
      p.size *= 7;
      p.effort *= 7;
    }
    const auto rb = fit_nominal_productivity(both);
    CHECK(rb.regression_slope == doctest::Approx(r.regression_slope).epsilon(1e-14));
    for (const auto& [id, v] : r.per_project_nominal) {
      CHECK(rb.per_project_nominal.at(id) == doctest::Approx(v).epsilon(1e-14));
    }

    auto sizes = pts;
    for (auto& p : sizes) p.size *= 3;
    const auto rs = fit_nominal_productivity(sizes);
    CHECK(rs.nominal_productivity == doctest::Approx(3 * r.nominal_productivity).epsilon(1e-14));
    for (const auto& [id, res] : r.residuals) CHECK(rs.residuals.at(id) == doctest::Approx(res).epsilon(1e-12));
  }

  TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS(fit_nominal_productivity(std::vector<CalibrationPoint>{{"A", 10, 25, 0.25}}));
    CHECK_THROWS(fit_nominal_productivity(std::vector<CalibrationPoint>{{"A", -1, 25, 0}, {"B", 1, 2, 0}}));
    CHECK_THROWS(fit_nominal_productivity(std::vector<CalibrationPoint>{{"A", 1, 0, 0}, {"B", 1, 2, 0}}));
    CHECK_THROWS(fit_nominal_productivity(std::vector<CalibrationPoint>{{"A", 1, 2, -1}, {"B", 1, 2, 0}}));
    CHECK_THROWS(fit_nominal_productivity(std::vector<CalibrationPoint>{{"A", 1, 2, 0}, {"A", 1, 2, 0}}));
  }
}

TEST_SUITE("estimation") {
  TEST_CASE("constant cost distributions") {
    const SamplePlan plan{SampleMethod::latin_hypercube, 50};
    auto d = estimate_cost(one_factor_model(point(0.25)), {{"f", 0}}, 10, 0.5, plan, RandomSeed{});
    CHECK(std::all_of(d.samples.begin(), d.samples.end(), [](double x) { return x == 20.0; }));
    d = estimate_cost(one_factor_model(point(0.25)), {{"f", 3}}, 10, 0.5, plan, RandomSeed{});
    CHECK(std::all_of(d.samples.begin(), d.samples.end(), [](double x) { return x == 25.0; }));

    // interaction with sign -1 pulls the overhead to -0.5
    const auto m = interaction_model(point(0.0), point(0.0), point(0.5), -1);
    d = estimate_cost(m, {{"a", 3}, {"b", 3}}, 10, 0.5, plan, RandomSeed{});
    CHECK(std::all_of(d.samples.begin(), d.samples.end(), [](double x) { return x == 10.0; }));

    const auto lethal = interaction_model(point(0.0), point(0.0), point(1.0), -1);
    CHECK_THROWS_AS(estimate_cost(lethal, {{"a", 3}, {"b", 3}}, 10, 0.5, plan, RandomSeed{}), std::domain_error);
  }

  TEST_CASE("quantile and exceedance examples") {
    const auto d = sorted_samples({400, 100, 300, 200});
    CHECK(quantile(d, 0.5) == 200);
    CHECK(quantile(d, 1.0) == 400);
    CHECK(quantile(d, 0.01) == 100);
    CHECK(exceedance_probability(d, 250) == 0.5);
    CHECK(exceedance_probability(d, 400) == 0.0);
    CHECK(exceedance_probability(d, 1e9) == 0.0);
    CHECK(exceedance_probability(d, 0) == 1.0);
    CHECK_THROWS(quantile(d, 0.0));
    CHECK_THROWS(quantile(d, 1.1));
    CHECK_THROWS(quantile(CostDistribution{}, 0.5));
  }

  TEST_CASE("point estimates") {
    CHECK(point_estimate(sorted_samples({7, 7, 7})) == 7);
    CHECK(point_estimate(sorted_samples({10, 20, 30})) == 20);
    CHECK(point_estimate(sorted_samples({10, 20, 30, 40})) == 20);
    CHECK(point_estimate(sorted_samples({10, 20, 30, 40}), EstimateConvention::mean) == 25);
    CHECK(parse_estimate_convention(to_string(EstimateConvention::mean)) == EstimateConvention::mean);
  }

  TEST_CASE("property: CDF duality and monotonicity on random sample sets") {
    UniformStream rng(RandomSeed{21});
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> s(1 + rng.below(50));
      for (auto& x : s) x = std::round(100.0 * rng.next()) / 4.0;  // ties are likely
      const auto d = sorted_samples(s);
      double prev = -INFINITY;
      for (int i = 1; i <= 99; ++i) {
        const double p = i / 100.0;
        const double q = quantile(d, p);
        CHECK(q == counting_quantile(s, p));
        CHECK(std::find(s.begin(), s.end(), q) != s.end());
        const auto at_most = std::count_if(s.begin(), s.end(), [&](double y) { return y <= q; });
        CHECK(static_cast<double>(at_most) / s.size() >= p);
        CHECK(q >= prev);
        prev = q;
      }
      double prev_exceed = 1.0;
      for (double b = -1.0; b <= 26.0; b += 0.125) {
        const double e = exceedance_probability(d, b);
        CHECK(e <= prev_exceed);
        prev_exceed = e;
      }
    }
  }

  TEST_CASE("property: scaling size scales every sample") {
    const auto m = interaction_model({0.1, 0.2, 0.3}, {0.1, 0.15, 0.2}, {0.05, 0.1, 0.2});
    const RatingVector r{{"a", 2}, {"b", 1}};
    const SamplePlan plan{SampleMethod::monte_carlo, 200};
    const auto base = estimate_cost(m, r, 10, 0.5, plan, RandomSeed{3});
    const auto big = estimate_cost(m, r, 40, 0.5, plan, RandomSeed{3});
    for (std::size_t i = 0; i < base.samples.size(); ++i) {
      CHECK(big.samples[i] == doctest::Approx(4 * base.samples[i]).epsilon(1e-14));
    }
    CHECK(point_estimate(big) == doctest::Approx(4 * point_estimate(base)).epsilon(1e-14));
    CHECK(quantile(big, 0.7) == doctest::Approx(4 * quantile(base, 0.7)).epsilon(1e-14));
  }
}
