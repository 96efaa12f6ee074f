#include "cobra/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cobra {

std::string_view to_string(EstimateConvention convention) {
  return convention == EstimateConvention::median ? "median" : "mean";
}

EstimateConvention parse_estimate_convention(std::string_view text) {
  if (text == "median") return EstimateConvention::median;
  if (text == "mean") return EstimateConvention::mean;
  throw std::invalid_argument("unknown estimate convention '" + std::string(text) + "'");
}

CostDistribution cost_from_overhead(const OverheadDistribution& overhead, double size, double nominal_productivity) {
  if (!(size > 0.0)) throw std::invalid_argument("size must be positive");
  if (!(nominal_productivity > 0.0)) throw std::invalid_argument("nominal productivity must be positive");
  const double nominal_cost = size / nominal_productivity;
  CostDistribution dist{{}, size, nominal_productivity, overhead.plan, overhead.seed};
  dist.samples.reserve(overhead.samples.size());
  for (double co : overhead.samples) {
    if (!(co > -1.0)) {
      throw std::domain_error("simulated cost overhead " + std::to_string(co) + " implies non-positive effort");
    }
    dist.samples.push_back(nominal_cost * (1.0 + co));
  }
  return dist;
}

CostDistribution estimate_cost(const CausalModel& model, const RatingVector& ratings, double size,
                               double nominal_productivity, const SamplePlan& plan, RandomSeed seed) {
  return cost_from_overhead(simulate_overhead(model, ratings, plan, seed), size, nominal_productivity);
}

namespace {

void require_samples(const CostDistribution& dist) {
  if (dist.samples.empty()) throw std::invalid_argument("empty cost distribution");
}

}  // namespace

double quantile(const CostDistribution& dist, double p) {
  require_samples(dist);
  if (!(p > 0.0 && p <= 1.0)) throw std::out_of_range("probability must lie in (0, 1]");
  const std::size_t n = dist.samples.size();
  const double count = static_cast<double>(n);
  // smallest k with k / n >= p, evaluated with the same division as the definition
  std::size_t k = static_cast<std::size_t>(std::ceil(p * count));
  k = std::clamp<std::size_t>(k, 1, n);
  while (k > 1 && static_cast<double>(k - 1) / count >= p) --k;
  while (k < n && static_cast<double>(k) / count < p) ++k;
  return dist.samples[k - 1];
}

double exceedance_probability(const CostDistribution& dist, double budget) {
  require_samples(dist);
  const auto above = dist.samples.end() - std::upper_bound(dist.samples.begin(), dist.samples.end(), budget);
  return static_cast<double>(above) / static_cast<double>(dist.samples.size());
}

double point_estimate(const CostDistribution& dist) {
  require_samples(dist);
  return dist.samples[(dist.samples.size() - 1) / 2];
}

double point_estimate(const CostDistribution& dist, EstimateConvention convention) {
  if (convention == EstimateConvention::median) return point_estimate(dist);
  require_samples(dist);
  return std::accumulate(dist.samples.begin(), dist.samples.end(), 0.0) / static_cast<double>(dist.samples.size());
}

}  // namespace cobra
