#pragma once

#include <string_view>
#include <vector>

#include "cobra/sampling.hpp"

namespace cobra {

/// Sorted simulated efforts (person-hours) of one project.
struct CostDistribution {
  std::vector<double> samples;
  double size = 0.0;
  double nominal_productivity = 0.0;
  SamplePlan plan;
  RandomSeed seed;
};

enum class EstimateConvention { median, mean };

std::string_view to_string(EstimateConvention convention);
EstimateConvention parse_estimate_convention(std::string_view text);

/// Maps each overhead sample to (size / nominal_productivity) * (1 + CO).
/// Throws std::domain_error if any CO <= -1.
CostDistribution cost_from_overhead(const OverheadDistribution& overhead, double size, double nominal_productivity);

CostDistribution estimate_cost(const CausalModel& model, const RatingVector& ratings, double size,
                               double nominal_productivity, const SamplePlan& plan, RandomSeed seed);

/// Lower empirical quantile: smallest sample x with #{samples <= x} / N >= p, for 0 < p <= 1.
double quantile(const CostDistribution& dist, double p);

/// Fraction of samples strictly above `budget`.
double exceedance_probability(const CostDistribution& dist, double budget);

/// Lower median.
double point_estimate(const CostDistribution& dist);
double point_estimate(const CostDistribution& dist, EstimateConvention convention);

}  // namespace cobra
