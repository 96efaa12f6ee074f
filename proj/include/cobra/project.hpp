#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cobra/model.hpp"

namespace cobra {

/// Measured attribute: numeric or categorical.
using AttributeValue = std::variant<double, std::string>;

/// One past project. Optional and absent fields are kept as such so data
/// validation can report them; an unmeasured phase is absent, never zero.
struct ProjectRecord {
  std::string id;
  std::optional<double> size;
  std::map<std::string, double> phase_efforts;  // phase -> person-hours
  std::map<std::string, RatingVector> ratings;  // expert -> ratings
  std::map<std::string, AttributeValue> attributes;

  /// Sum over all recorded phases.
  double recorded_effort() const;

  bool operator==(const ProjectRecord&) const = default;
};

/// Applies recode_ratings() to every expert rating of every project.
std::vector<ProjectRecord> recode_project_ratings(const CausalModel& model, const std::vector<ProjectRecord>& projects);

}  // namespace cobra
