#pragma once

#include <map>
#include <span>
#include <string>

#include "cobra/sampling.hpp"

namespace cobra {

struct CalibrationPoint {
  std::string project_id;
  double size = 0.0;
  double effort = 0.0;
  double mean_overhead = 0.0;
};

/// Nominal productivity is size per person-hour of a nominal project.
/// Effort is modelled as (size / nominal_productivity) * (1 + CO), so the
/// fit is a least-squares line through the origin of effort on size * (1 + CO).
struct CalibrationResult {
  double nominal_productivity = 0.0;
  double regression_slope = 0.0;
  std::map<std::string, double> per_project_nominal;
  std::map<std::string, double> residuals;
};

double mean_overhead(const OverheadDistribution& dist);

CalibrationResult fit_nominal_productivity(std::span<const CalibrationPoint> points);

}  // namespace cobra
