#include "cobra/project.hpp"

namespace cobra {

double ProjectRecord::recorded_effort() const {
  double total = 0.0;
  for (const auto& [phase, effort] : phase_efforts) total += effort;
  return total;
}

std::vector<ProjectRecord> recode_project_ratings(const CausalModel& model,
                                                  const std::vector<ProjectRecord>& projects) {
  auto out = projects;
  for (auto& project : out) {
    for (auto& [expert, ratings] : project.ratings) ratings = recode_ratings(model, ratings);
  }
  return out;
}

}  // namespace cobra
