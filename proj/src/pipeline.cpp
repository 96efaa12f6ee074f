#include "cobra/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cobra {

namespace {

std::string unusable_reason(const ProjectRecord& p, const CausalModel& model) {
  if (!p.size) return "size not recorded";
  if (!(std::isfinite(*p.size) && *p.size > 0.0)) return "size must be positive";
  if (p.phase_efforts.empty()) return "no effort recorded";
  for (const auto& [phase, effort] : p.phase_efforts) {
    if (!(std::isfinite(effort) && effort >= 0.0)) return "negative effort in phase " + phase;
  }
  for (const auto& factor : model.factors) {
    bool rated = false;
    for (const auto& [expert, ratings] : p.ratings) {
      auto it = ratings.find(factor.id);
      if (it == ratings.end()) continue;
      if (it->second < 0 || it->second > factor.scale.level_count) {
        return "rating of " + factor.id + " by " + expert + " out of scale";
      }
      rated = true;
    }
    if (!rated) return "factor " + factor.id + " not rated";
  }
  return {};
}

std::vector<std::string> numeric_attribute_names(std::span<const ProjectRecord> projects) {
  std::set<std::string> names;
  for (const auto& p : projects) {
    for (const auto& [name, value] : p.attributes) {
      if (std::holds_alternative<double>(value)) names.insert(name);
    }
  }
  return {names.begin(), names.end()};
}

Candidate attribute_candidate(const std::string& name, std::span<const ProjectRecord> projects) {
  Candidate c{name, CandidateKind::attribute, {}};
  for (const auto& p : projects) {
    auto it = p.attributes.find(name);
    const double* v = it == p.attributes.end() ? nullptr : std::get_if<double>(&it->second);
    c.values.push_back(v != nullptr ? *v : std::numeric_limits<double>::quiet_NaN());
  }
  return c;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

PreModelingReport run_pre_modeling(const CausalModel& model, std::span<const ProjectRecord> projects,
                                   const IterationConfig& config) {
  require_valid(model);
  PreModelingReport pre;
  pre.data_quality = validate_data(projects, model, {config.thresholds.disagreement});

  std::vector<ProjectRecord> usable;
  std::set<std::string> seen;
  for (const auto& p : projects) {
    auto reason = unusable_reason(p, model);
    if (reason.empty() && !seen.insert(p.id).second) reason = "duplicate project id";
    if (reason.empty()) {
      usable.push_back(p);
    } else {
      pre.excluded.emplace_back(p.id, std::move(reason));
    }
  }
  if (usable.size() < 3) throw std::invalid_argument("fewer than 3 usable projects after validation");

  pre.scope = harmonize_effort_scope(usable, config.scope);
  std::erase_if(usable, [&](const ProjectRecord& p) {
    if (pre.scope.totals.at(p.id) > 0.0) return false;
    pre.excluded.emplace_back(p.id, "no effort within the common scope");
    return true;
  });
  if (usable.size() < 3) throw std::invalid_argument("fewer than 3 projects with effort in the common scope");

  pre.disagreement = assess_expert_disagreement(usable, model, config.thresholds.disagreement);

  std::vector<CalibrationPoint> points;
  for (const auto& p : usable) {
    const auto dist =
        simulate_overhead(model, pre.disagreement.aggregated.at(p.id), config.plan, project_seed(config.seed, p.id));
    const double co = mean_overhead(dist);
    pre.model_overhead[p.id] = co;
    points.push_back({p.id, *p.size, pre.scope.totals.at(p.id), co});
  }
  pre.calibration = fit_nominal_productivity(points);

  std::vector<double> target;
  std::vector<std::string> ids;
  std::vector<double> productivities;
  for (const auto& p : usable) {
    const double co = empirical_overhead(pre.scope.totals.at(p.id), *p.size, pre.calibration.nominal_productivity);
    pre.empirical_overhead[p.id] = co;
    target.push_back(co);
    ids.push_back(p.id);
    productivities.push_back(pre.calibration.per_project_nominal.at(p.id));
  }

  std::vector<Candidate> candidates;
  for (const auto& factor : model.factors) {
    Candidate c{factor.id, CandidateKind::factor, {}};
    for (const auto& p : usable) c.values.push_back(pre.disagreement.aggregated.at(p.id).at(factor.id));
    candidates.push_back(std::move(c));
  }
  for (const auto& name : numeric_attribute_names(usable)) {
    if (model.find_factor(name) == nullptr) candidates.push_back(attribute_candidate(name, usable));
  }

  if (usable.size() >= 4) {
    pre.ranking = rank_cost_drivers(
        candidates, target,
        {config.thresholds.rho, config.thresholds.alpha, config.permutations, config.seed.derive("ranking")});
    std::vector<Candidate> selected;
    for (const auto& c : candidates) {
      const auto* entry = pre.ranking.find(c.id);
      if (entry != nullptr && entry->selected) selected.push_back(c);
    }
    if (selected.size() >= 2) {
      pre.associations = detect_factor_associations(selected, config.thresholds.association);
    }
    pre.outliers.outliers = detect_outliers(ids, productivities);
  }
  pre.outliers.separators = find_group_separators(usable, pre.calibration.per_project_nominal, config.thresholds.alpha);
  return pre;
}

std::vector<EvaluationCase> evaluation_cases(const PreModelingReport& pre, std::span<const ProjectRecord> projects) {
  std::vector<EvaluationCase> cases;
  for (const auto& p : projects) {
    if (pre.model_overhead.count(p.id) == 0) continue;
    cases.push_back({p.id, *p.size, pre.scope.totals.at(p.id), pre.disagreement.aggregated.at(p.id)});
  }
  return cases;
}

StopDecision check_stop_criterion(const EvaluationReport& evaluation, const IterationConfig& config) {
  StopDecision d;
  d.mmre = evaluation.metrics.mmre;
  d.target = config.target_mmre;
  d.stop = d.mmre <= d.target;
  d.rationale = "MMRE " + format_number(d.mmre) + (d.stop ? " <= " : " > ") + "target " + format_number(d.target) +
                (d.stop ? ": objectives met, stop refining" : ": refine and iterate");
  return d;
}

IterationReport run_iteration(const CausalModel& model, std::span<const ProjectRecord> projects,
                              const IterationConfig& config) {
  if (!(config.target_mmre > 0.0)) throw std::invalid_argument("target MMRE must be positive");
  IterationReport report;
  report.config = config;
  report.pre = run_pre_modeling(model, projects, config);
  const auto& pre = report.pre;

  const auto cases = evaluation_cases(pre, projects);
  report.evaluation =
      loocv_evaluate(model, cases, {config.plan, config.seed, config.convention, config.keep_distributions});

  std::vector<ProjectRecord> usable;
  std::vector<double> residuals;
  Candidate size{"size", CandidateKind::size, {}};
  for (const auto& p : projects) {
    if (pre.model_overhead.count(p.id) == 0) continue;
    usable.push_back(p);
    residuals.push_back(pre.empirical_overhead.at(p.id) - pre.model_overhead.at(p.id));
    size.values.push_back(*p.size);
  }
  if (usable.size() >= 4) {
    std::vector<Candidate> unused;
    for (const auto& name : numeric_attribute_names(usable)) {
      if (model.find_factor(name) == nullptr) unused.push_back(attribute_candidate(name, usable));
    }
    unused.push_back(std::move(size));
    report.missing_drivers = suggest_missing_drivers(
        unused, residuals,
        {config.thresholds.rho, config.thresholds.alpha, config.permutations, config.seed.derive("residual")});
  }
  report.pre_post = compare_pre_post(pre.ranking, model, config.thresholds.rho);

  auto& out = report.suggestions;
  auto suggest = [&](RefinementSuggestion s) {
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const RefinementSuggestion& o) {
      return o.kind == s.kind && o.subject == s.subject;
    });
    if (!duplicate) out.push_back(std::move(s));
  };
  for (const auto& id : pre.scope.deviating) {
    std::string missing;
    for (const auto& phase : pre.scope.missing_phases.at(id)) missing += (missing.empty() ? "" : ", ") + phase;
    suggest({SuggestionKind::fix_effort_scope, id, "scope:" + id,
             "effort of phase(s) " + missing + " not measured; totals cover a different scope"});
  }
  for (const auto& flag : pre.outliers.outliers.flagged) {
    suggest({SuggestionKind::remove_outlier, flag.project_id, "outlier:" + flag.project_id,
             "nominal productivity " + format_number(flag.value) + " outside fences [" +
                 format_number(pre.outliers.outliers.fences.lower_fence) + ", " +
                 format_number(pre.outliers.outliers.fences.upper_fence) + "]"});
  }
  for (const auto& cell : pre.disagreement.flagged) {
    const std::string subject = cell.project_id + "/" + cell.factor_id;
    suggest({SuggestionKind::re_elicit_ratings, subject, "disagreement:" + subject,
             "expert ratings span " + std::to_string(cell.range) + " levels; resolve in a joint meeting"});
  }
  for (const auto& sep : pre.outliers.separators.separators) {
    suggest({SuggestionKind::add_candidate_factor, sep.attribute, "separator:" + sep.attribute + "=" + sep.level,
             "projects with " + sep.attribute + "=" + sep.level +
                 " differ in productivity (p=" + format_number(sep.p_value) + ")"});
  }
  for (const auto& s : report.missing_drivers.suggestions) suggest(s);
  for (const auto& f : report.pre_post) suggest(f.suggestion);

  report.stop = check_stop_criterion(report.evaluation, config);
  return report;
}

std::set<std::string> finding_references(const IterationReport& report) {
  std::set<std::string> refs;
  const auto& pre = report.pre;
  for (const auto& id : pre.scope.deviating) refs.insert("scope:" + id);
  for (const auto& f : pre.outliers.outliers.flagged) refs.insert("outlier:" + f.project_id);
  for (const auto& c : pre.disagreement.flagged) refs.insert("disagreement:" + c.project_id + "/" + c.factor_id);
  for (const auto& s : pre.outliers.separators.separators) refs.insert("separator:" + s.attribute + "=" + s.level);
  for (const auto& e : report.missing_drivers.ranking.entries) refs.insert("residual:" + e.id);
  for (const auto& f : report.pre_post) refs.insert("prepost:" + f.subject);
  return refs;
}

std::vector<ProjectRecord> apply_refinements(std::span<const ProjectRecord> projects,
                                             std::span<const RefinementSuggestion> suggestions,
                                             const std::set<std::string>& common_scope,
                                             const std::set<SuggestionKind>& kinds) {
  std::set<std::string> removed;
  bool restrict_scope = false;
  for (const auto& s : suggestions) {
    if (kinds.count(s.kind) == 0) continue;
    if (s.kind == SuggestionKind::remove_outlier) removed.insert(s.subject);
    if (s.kind == SuggestionKind::fix_effort_scope) restrict_scope = true;
  }
  std::vector<ProjectRecord> out;
  for (const auto& p : projects) {
    if (removed.count(p.id) != 0) continue;
    out.push_back(p);
    if (restrict_scope) {
      std::erase_if(out.back().phase_efforts, [&](const auto& entry) { return common_scope.count(entry.first) == 0; });
    }
  }
  return out;
}

}  // namespace cobra
