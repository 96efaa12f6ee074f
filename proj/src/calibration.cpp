#include "cobra/calibration.hpp"

#include <numeric>
#include <stdexcept>

namespace cobra {

double mean_overhead(const OverheadDistribution& dist) {
  if (dist.samples.empty()) throw std::invalid_argument("empty overhead distribution");
  return std::accumulate(dist.samples.begin(), dist.samples.end(), 0.0) / static_cast<double>(dist.samples.size());
}

CalibrationResult fit_nominal_productivity(std::span<const CalibrationPoint> points) {
  if (points.size() < 2) throw std::invalid_argument("calibration needs at least 2 projects");
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& p : points) {
    if (!(p.size > 0.0)) throw std::invalid_argument("project " + p.project_id + ": size must be positive");
    if (!(p.effort > 0.0)) throw std::invalid_argument("project " + p.project_id + ": effort must be positive");
    if (!(p.mean_overhead > -1.0)) {
      throw std::invalid_argument("project " + p.project_id + ": cost overhead must exceed -1");
    }
    const double x = p.size * (1.0 + p.mean_overhead);
    sxy += x * p.effort;
    sxx += x * x;
  }
  if (sxx == 0.0) throw std::invalid_argument("degenerate calibration data");

  CalibrationResult result;
  result.regression_slope = sxy / sxx;
  result.nominal_productivity = 1.0 / result.regression_slope;
  for (const auto& p : points) {
    const double x = p.size * (1.0 + p.mean_overhead);
    if (!result.per_project_nominal.emplace(p.project_id, x / p.effort).second) {
      throw std::invalid_argument("duplicate project id " + p.project_id);
    }
    result.residuals[p.project_id] = p.effort - result.regression_slope * x;
  }
  return result;
}

}  // namespace cobra
