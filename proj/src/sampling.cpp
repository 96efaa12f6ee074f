#include "cobra/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cobra {

std::string_view to_string(SampleMethod method) { return method == SampleMethod::monte_carlo ? "mc" : "lhs"; }

SampleMethod parse_sample_method(std::string_view text) {
  if (text == "mc" || text == "monte_carlo") return SampleMethod::monte_carlo;
  if (text == "lhs" || text == "latin_hypercube") return SampleMethod::latin_hypercube;
  throw std::invalid_argument("unknown sampling method '" + std::string(text) + "'");
}

double triangular_inverse_cdf(const TriangularParams& params, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw std::out_of_range("u must lie in [0, 1]");
  const double a = params.min;
  const double c = params.likely;
  const double b = params.max;
  if (!(a <= c && c <= b)) throw std::invalid_argument("triangular parameters out of order");
  const double width = b - a;
  if (width == 0.0) return a;
  const double split = (c - a) / width;
  if (u <= split) return a + std::sqrt(u * width * (c - a));
  return b - std::sqrt((1.0 - u) * width * (b - c));
}

std::vector<double> draw_uniforms(const SamplePlan& plan, std::size_t variable_index, RandomSeed seed) {
  if (plan.count == 0) throw std::invalid_argument("sample count must be at least 1");
  UniformStream stream(seed.derive(static_cast<std::uint64_t>(variable_index)));
  const std::size_t n = plan.count;
  std::vector<double> u(n);
  if (plan.method == SampleMethod::monte_carlo) {
    for (auto& x : u) x = stream.next();
    return u;
  }

  std::vector<std::size_t> strata(n);
  std::iota(strata.begin(), strata.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(strata[i - 1], strata[stream.below(i)]);
  }
  const double width = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lower = static_cast<double>(strata[i]);
    const double x = (lower + stream.next()) * width;
    // rounding may land on the next stratum's lower edge
    const double ceiling = std::nextafter((lower + 1.0) * width, 0.0);
    u[i] = std::min(x, ceiling);
  }
  return u;
}

namespace {

// Column k holds the sampled values of influence k.
std::vector<std::vector<double>> sample_columns(const std::vector<Influence>& influences, const SamplePlan& plan,
                                                RandomSeed seed) {
  std::vector<std::vector<double>> columns;
  columns.reserve(influences.size());
  for (std::size_t k = 0; k < influences.size(); ++k) {
    auto column = draw_uniforms(plan, k, seed);
    for (auto& x : column) x = triangular_inverse_cdf(influences[k].params, x);
    columns.push_back(std::move(column));
  }
  return columns;
}

}  // namespace

std::vector<MultiplierDraw> draw_multipliers(const CausalModel& model, const SamplePlan& plan, RandomSeed seed) {
  require_valid(model);
  const auto influences = canonical_influences(model);
  const auto columns = sample_columns(influences, plan, seed);
  std::vector<MultiplierDraw> draws(plan.count);
  for (std::size_t i = 0; i < plan.count; ++i) {
    for (std::size_t k = 0; k < influences.size(); ++k) draws[i][influences[k].key] = columns[k][i];
  }
  return draws;
}

OverheadDistribution simulate_overhead(const CausalModel& model, const RatingVector& ratings, const SamplePlan& plan,
                                       RandomSeed seed) {
  require_valid(model);
  if (plan.count == 0) throw std::invalid_argument("sample count must be at least 1");
  const auto influences = canonical_influences(model);
  const auto coefficients = overhead_coefficients(model, ratings);

  OverheadDistribution dist{std::vector<double>(plan.count, 0.0), plan, seed};
  for (std::size_t k = 0; k < influences.size(); ++k) {
    // streams are per variable, so skipping an inactive influence leaves the others unchanged
    if (coefficients[k] == 0.0) continue;
    const auto uniforms = draw_uniforms(plan, k, seed);
    for (std::size_t i = 0; i < plan.count; ++i) {
      dist.samples[i] += coefficients[k] * triangular_inverse_cdf(influences[k].params, uniforms[i]);
    }
  }
  std::sort(dist.samples.begin(), dist.samples.end());
  return dist;
}

}  // namespace cobra
