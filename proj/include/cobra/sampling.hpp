#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "cobra/model.hpp"
#include "cobra/random.hpp"

namespace cobra {

enum class SampleMethod { monte_carlo, latin_hypercube };

struct SamplePlan {
  SampleMethod method = SampleMethod::latin_hypercube;
  std::size_t count = 10000;

  bool operator==(const SamplePlan&) const = default;
};

std::string_view to_string(SampleMethod method);
SampleMethod parse_sample_method(std::string_view text);

/// Sorted simulated cost-overhead fractions of one project.
struct OverheadDistribution {
  std::vector<double> samples;
  SamplePlan plan;
  RandomSeed seed;
};

/// Closed-form inverse CDF of the triangular distribution (min, likely, max).
double triangular_inverse_cdf(const TriangularParams& params, double u);

/// Uniforms for sampled variable `variable_index`. Monte Carlo draws are
/// independent; Latin Hypercube places exactly one draw in each of the
/// `plan.count` equal strata, in seeded random order.
std::vector<double> draw_uniforms(const SamplePlan& plan, std::size_t variable_index, RandomSeed seed);

/// The `plan.count` multiplier draws behind simulate_overhead, in iteration order.
std::vector<MultiplierDraw> draw_multipliers(const CausalModel& model, const SamplePlan& plan, RandomSeed seed);

OverheadDistribution simulate_overhead(const CausalModel& model, const RatingVector& ratings, const SamplePlan& plan,
                                       RandomSeed seed);

}  // namespace cobra
