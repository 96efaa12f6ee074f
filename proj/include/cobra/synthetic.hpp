#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cobra/project.hpp"
#include "cobra/random.hpp"

namespace cobra {

/// Data defects planted on top of a clean synthetic organization.
struct PlantedDefects {
  bool outlier = false;  // multiply one project's effort by outlier_factor
  double outlier_factor = 4.0;
  std::size_t scope_defects = 0;  // projects whose `dropped_phase` effort goes unmeasured
  std::string dropped_phase = "req";
  std::size_t decoys = 0;           // pure-noise numeric attributes decoy_1..decoy_k
  bool disagreeing_expert = false;  // add two agreeing experts and one that contradicts them
  std::string hidden_driver;        // numeric attribute that drives effort but is not modeled
  double hidden_strength = 0.0;     // effort *= 1 + strength * value, value in [0, 1)
};

struct SyntheticSpec {
  CausalModel model;
  double nominal_productivity = 0.5;
  std::size_t project_count = 16;
  double size_min = 10.0;
  double size_max = 100.0;
  RandomSeed seed;
  double noise = 0.0;  // multiplicative effort noise, uniform in [-noise, +noise]
  std::vector<std::pair<std::string, double>> phase_shares = {{"req", 0.15}, {"impl", 0.60}, {"test", 0.25}};
  PlantedDefects defects;
};

struct GroundTruth {
  double nominal_productivity = 0.0;
  std::map<std::string, double> overhead;  // CO at the triangular means
  std::map<std::string, double> effort;    // full-scope effort before defects
  std::optional<std::string> outlier;
  std::vector<std::string> scope_defects;
  std::vector<std::string> decoys;
  std::vector<std::pair<std::string, std::string>> disagreement_cells;
};

struct SyntheticDataset {
  std::vector<ProjectRecord> projects;
  GroundTruth truth;
};

/// Five-driver model with triangular extremes inside [0.05, 0.5].
CausalModel default_synthetic_model();

/// Ratings uniform per factor scale; effort = (size / P) * (1 + CO) * (1 + eps).
/// Base data, noise and each defect use separate seeded streams, so adding a
/// defect leaves everything else unchanged.
SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec);

}  // namespace cobra
