#include "cobra/analysis_pre.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cobra {

std::string_view to_string(FindingCategory category) {
  switch (category) {
    case FindingCategory::completeness: return "completeness";
    case FindingCategory::consistency: return "consistency";
    case FindingCategory::correctness: return "correctness";
  }
  return "";
}

std::string_view to_string(CandidateKind kind) {
  switch (kind) {
    case CandidateKind::factor: return "factor";
    case CandidateKind::attribute: return "attribute";
    case CandidateKind::size: return "size";
  }
  return "";
}

std::set<std::string> majority_phases(std::span<const ProjectRecord> projects) {
  std::map<std::string, std::size_t> counts;
  for (const auto& p : projects) {
    for (const auto& [phase, _] : p.phase_efforts) ++counts[phase];
  }
  std::set<std::string> out;
  for (const auto& [phase, count] : counts) {
    if (2 * count > projects.size()) out.insert(phase);
  }
  return out;
}

DataQualityReport validate_data(std::span<const ProjectRecord> projects, const CausalModel& model,
                                const ValidationOptions& options) {
  DataQualityReport report;
  auto add = [&](FindingCategory category, const std::string& project, std::string field, std::string message) {
    report.findings.push_back({category, project, std::move(field), std::move(message)});
  };

  std::set<std::string> ids;
  const auto expected = majority_phases(projects);
  for (const auto& p : projects) {
    if (!ids.insert(p.id).second) add(FindingCategory::correctness, p.id, "project_id", "duplicate project id");

    if (!p.size) {
      add(FindingCategory::completeness, p.id, "size", "size not recorded");
    } else if (!(std::isfinite(*p.size) && *p.size > 0.0)) {
      add(FindingCategory::correctness, p.id, "size", "size must be positive");
    }

    if (p.phase_efforts.empty()) add(FindingCategory::completeness, p.id, "effort", "no phase effort recorded");
    for (const auto& [phase, effort] : p.phase_efforts) {
      if (!(std::isfinite(effort) && effort >= 0.0)) {
        add(FindingCategory::correctness, p.id, "effort_" + phase, "effort must be nonnegative");
      }
    }
    for (const auto& phase : expected) {
      if (!p.phase_efforts.empty() && p.phase_efforts.count(phase) == 0) {
        add(FindingCategory::consistency, p.id, "effort_" + phase,
            "phase measured by most projects is missing; total effort covers a different scope");
      }
    }

    if (p.ratings.empty()) add(FindingCategory::completeness, p.id, "ratings", "no expert ratings");
    for (const auto& [expert, ratings] : p.ratings) {
      for (const auto& [factor_id, rating] : ratings) {
        const auto* factor = model.find_factor(factor_id);
        const std::string field = "factor_" + factor_id + "_expert_" + expert;
        if (factor == nullptr) {
          add(FindingCategory::consistency, p.id, field, "rating for a factor the model does not declare");
        } else if (rating < 0 || rating > factor->scale.level_count) {
          add(FindingCategory::correctness, p.id, field,
              "rating " + std::to_string(rating) + " outside [0, " + std::to_string(factor->scale.level_count) + "]");
        }
      }
    }
  }

  const auto disagreement = assess_expert_disagreement(projects, model, options.disagreement_threshold);
  for (const auto& f : disagreement.unrated) report.findings.push_back(f);
  for (const auto& cell : disagreement.flagged) {
    add(FindingCategory::consistency, cell.project_id, "factor_" + cell.factor_id,
        "expert ratings span " + std::to_string(cell.range) + " levels");
  }
  return report;
}

ScopePolicy parse_scope_policy(std::string_view text) {
  if (text == "modal") return {ScopePolicyKind::modal, {}};
  if (text == "as-recorded" || text == "as_recorded") return {ScopePolicyKind::as_recorded, {}};
  constexpr std::string_view prefix = "phases=";
  if (text.substr(0, prefix.size()) == prefix) {
    ScopePolicy policy{ScopePolicyKind::explicit_phases, {}};
    std::stringstream ss{std::string(text.substr(prefix.size()))};
    std::string phase;
    while (std::getline(ss, phase, ',')) {
      if (!phase.empty()) policy.phases.insert(phase);
    }
    return policy;
  }
  throw std::invalid_argument("unknown effort-scope policy '" + std::string(text) + "'");
}

std::string to_string(const ScopePolicy& policy) {
  switch (policy.kind) {
    case ScopePolicyKind::modal: return "modal";
    case ScopePolicyKind::as_recorded: return "as-recorded";
    case ScopePolicyKind::explicit_phases: break;
  }
  std::string out = "phases=";
  bool first = true;
  for (const auto& p : policy.phases) {
    if (!first) out += ",";
    out += p;
    first = false;
  }
  return out;
}

EffortScope harmonize_effort_scope(std::span<const ProjectRecord> projects, const ScopePolicy& policy) {
  if (projects.empty()) throw std::invalid_argument("effort scope of an empty project set");
  EffortScope scope;
  scope.policy = policy;
  scope.expected_phases = policy.kind == ScopePolicyKind::explicit_phases ? policy.phases : majority_phases(projects);

  if (policy.kind == ScopePolicyKind::explicit_phases) {
    scope.common_scope = policy.phases;
  } else {
    scope.common_scope.clear();
    bool first = true;
    for (const auto& p : projects) {
      std::set<std::string> phases;
      for (const auto& [phase, _] : p.phase_efforts) phases.insert(phase);
      if (first) {
        scope.common_scope = std::move(phases);
        first = false;
      } else {
        std::set<std::string> both;
        std::set_intersection(scope.common_scope.begin(), scope.common_scope.end(), phases.begin(), phases.end(),
                              std::inserter(both, both.begin()));
        scope.common_scope = std::move(both);
      }
    }
  }
  if (scope.common_scope.empty() && policy.kind != ScopePolicyKind::as_recorded) {
    throw std::invalid_argument("no effort phase is measured consistently across projects");
  }

  for (const auto& p : projects) {
    std::set<std::string> missing;
    for (const auto& phase : scope.expected_phases) {
      if (p.phase_efforts.count(phase) == 0) missing.insert(phase);
    }
    if (!missing.empty()) {
      scope.deviating.push_back(p.id);
      scope.missing_phases[p.id] = std::move(missing);
    }
    double total = 0.0;
    if (policy.kind == ScopePolicyKind::as_recorded) {
      total = p.recorded_effort();
    } else {
      for (const auto& phase : scope.common_scope) {
        if (auto it = p.phase_efforts.find(phase); it != p.phase_efforts.end()) total += it->second;
      }
    }
    scope.totals[p.id] = total;
  }
  return scope;
}

double empirical_overhead(double effort, double size, double nominal_productivity) {
  if (!(size > 0.0)) throw std::invalid_argument("size must be positive");
  if (!(nominal_productivity > 0.0)) throw std::invalid_argument("nominal productivity must be positive");
  return effort * nominal_productivity / size - 1.0;
}

const RankingEntry* FactorRanking::find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

namespace {

bool nearly_constant(const std::vector<double>& values) {
  if (values.empty()) return true;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double scale = std::max({1.0, std::abs(*lo), std::abs(*hi)});
  return (*hi - *lo) <= 1e-9 * scale;
}

}  // namespace

FactorRanking rank_cost_drivers(std::span<const Candidate> candidates, std::span<const double> target,
                                const RankingOptions& options) {
  if (target.size() < 4) throw std::invalid_argument("driver ranking needs at least 4 projects");
  FactorRanking ranking;
  for (const auto& candidate : candidates) {
    if (candidate.values.size() != target.size()) {
      throw std::invalid_argument("candidate " + candidate.id + " has " + std::to_string(candidate.values.size()) +
                                  " values for " + std::to_string(target.size()) + " projects");
    }
    RankingEntry entry;
    entry.id = candidate.id;
    entry.kind = candidate.kind;
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < target.size(); ++i) {
      if (std::isfinite(candidate.values[i]) && std::isfinite(target[i])) {
        x.push_back(candidate.values[i]);
        y.push_back(target[i]);
      }
    }
    entry.n = x.size();
    if (x.size() < 4) {
      entry.diagnostic = "fewer than 4 complete values";
    } else if (nearly_constant(y)) {
      entry.diagnostic = "target is constant; correlation undefined";
    } else if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
      entry.diagnostic = "candidate is constant; correlation undefined";
    } else {
      stats::PermutationOptions perm;
      perm.permutations = options.permutations;
      perm.seed = options.seed.derive("rank:" + candidate.id);
      const auto test = stats::spearman_test(x, y, perm);
      entry.rho = test.rho;
      entry.p_value = test.p_value;
      entry.exact = test.exact;
      entry.selected = entry.rho && std::abs(*entry.rho) >= options.rho_threshold && entry.p_value <= options.alpha;
    }
    ranking.entries.push_back(std::move(entry));
  }
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(), [](const RankingEntry& a, const RankingEntry& b) {
    if (a.rho.has_value() != b.rho.has_value()) return a.rho.has_value();
    if (a.rho && std::abs(*a.rho) != std::abs(*b.rho)) return std::abs(*a.rho) > std::abs(*b.rho);
    return a.id < b.id;
  });
  return ranking;
}

std::vector<Association> detect_factor_associations(std::span<const Candidate> candidates, double threshold) {
  std::vector<Association> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < candidates.size(); ++j) {
      std::vector<double> x;
      std::vector<double> y;
      const auto& a = candidates[i].values;
      const auto& b = candidates[j].values;
      for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
        if (std::isfinite(a[k]) && std::isfinite(b[k])) {
          x.push_back(a[k]);
          y.push_back(b[k]);
        }
      }
      const auto rho = stats::spearman(x, y);
      if (rho && std::abs(*rho) >= threshold) out.push_back({candidates[i].id, candidates[j].id, *rho});
    }
  }
  return out;
}

OutlierResult detect_outliers(std::span<const std::string> ids, std::span<const double> values) {
  if (ids.size() != values.size()) throw std::invalid_argument("outlier detection: length mismatch");
  if (values.size() < 4) throw std::invalid_argument("outlier detection needs at least 4 values");
  OutlierResult result;
  result.fences = stats::tukey_fences(values);
  const auto& f = result.fences;
  // ignore excursions at floating-point noise level
  const double slack =
      1e-9 * std::max({std::abs(f.lower_hinge), std::abs(f.upper_hinge), f.upper_hinge - f.lower_hinge});
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < f.lower_fence - slack || values[i] > f.upper_fence + slack) {
      result.flagged.push_back({ids[i], values[i]});
    }
  }
  return result;
}

SeparatorScan find_group_separators(std::span<const ProjectRecord> projects,
                                    const std::map<std::string, double>& target, double alpha) {
  // attribute -> (project id, level, target value) for projects with a categorical value
  std::map<std::string, std::vector<std::tuple<std::string, std::string, double>>> columns;
  for (const auto& p : projects) {
    auto t = target.find(p.id);
    if (t == target.end()) continue;
    for (const auto& [name, value] : p.attributes) {
      if (const auto* level = std::get_if<std::string>(&value)) {
        columns[name].emplace_back(p.id, *level, t->second);
      }
    }
  }

  SeparatorScan scan;
  for (const auto& [attribute, rows] : columns) {
    std::set<std::string> levels;
    for (const auto& row : rows) levels.insert(std::get<1>(row));
    if (levels.size() < 2) {
      scan.diagnostics.push_back(attribute + ": single level, no split");
      continue;
    }
    std::vector<std::string> groups(levels.begin(), levels.end());
    if (groups.size() == 2) groups.pop_back();
    for (const auto& level : groups) {
      std::vector<double> inside;
      std::vector<double> outside;
      std::vector<std::string> members;
      for (const auto& [id, value_level, value] : rows) {
        if (value_level == level) {
          inside.push_back(value);
          members.push_back(id);
        } else {
          outside.push_back(value);
        }
      }
      if (inside.size() < 2 || outside.size() < 2) {
        scan.diagnostics.push_back(attribute + "=" + level + ": fewer than 2 projects on one side, skipped");
        continue;
      }
      const auto test = stats::rank_sum_test(inside, outside);
      if (test.p_value <= alpha) {
        scan.separators.push_back({attribute, level, std::move(members), test.statistic, test.p_value});
      }
    }
  }
  std::stable_sort(scan.separators.begin(), scan.separators.end(),
                   [](const GroupSeparator& a, const GroupSeparator& b) { return a.p_value < b.p_value; });
  return scan;
}

DisagreementReport assess_expert_disagreement(std::span<const ProjectRecord> projects, const CausalModel& model,
                                              int threshold) {
  DisagreementReport report;
  for (const auto& p : projects) {
    auto& aggregated = report.aggregated[p.id];
    for (const auto& factor : model.factors) {
      std::vector<int> ratings;
      for (const auto& [expert, vector] : p.ratings) {
        if (auto it = vector.find(factor.id); it != vector.end()) ratings.push_back(it->second);
      }
      if (ratings.empty()) {
        report.unrated.push_back(
            {FindingCategory::completeness, p.id, "factor_" + factor.id, "no expert rated this factor"});
        continue;
      }
      const auto [lo, hi] = std::minmax_element(ratings.begin(), ratings.end());
      const int range = *hi - *lo;
      const int aggregate = stats::lower_median(ratings);
      aggregated[factor.id] = aggregate;
      if (range > threshold) report.flagged.push_back({p.id, factor.id, ratings, range, aggregate});
    }
  }
  return report;
}

}  // namespace cobra
