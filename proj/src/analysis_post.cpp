#include "cobra/analysis_post.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cobra/calibration.hpp"

namespace cobra {

std::string_view to_string(SuggestionKind kind) {
  switch (kind) {
    case SuggestionKind::remove_outlier: return "remove_outlier";
    case SuggestionKind::fix_effort_scope: return "fix_effort_scope";
    case SuggestionKind::re_elicit_ratings: return "re_elicit_ratings";
    case SuggestionKind::add_candidate_factor: return "add_candidate_factor";
    case SuggestionKind::refine_size_metric: return "refine_size_metric";
  }
  return "";
}

SuggestionKind parse_suggestion_kind(std::string_view text) {
  for (auto kind : {SuggestionKind::remove_outlier, SuggestionKind::fix_effort_scope, SuggestionKind::re_elicit_ratings,
                    SuggestionKind::add_candidate_factor, SuggestionKind::refine_size_metric}) {
    if (to_string(kind) == text) return kind;
  }
  throw std::invalid_argument("unknown suggestion kind '" + std::string(text) + "'");
}

AccuracyMetrics accuracy_metrics(std::span<const double> actuals, std::span<const double> estimates) {
  if (actuals.size() != estimates.size()) throw std::invalid_argument("accuracy metrics: length mismatch");
  if (actuals.empty()) throw std::invalid_argument("accuracy metrics of an empty set");
  const std::size_t n = actuals.size();
  std::vector<double> mre(n);
  std::vector<double> signed_error(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(actuals[i] > 0.0)) throw std::invalid_argument("actual effort must be positive");
    signed_error[i] = (estimates[i] - actuals[i]) / actuals[i];
    mre[i] = std::abs(actuals[i] - estimates[i]) / actuals[i];
  }
  AccuracyMetrics m;
  m.n = n;
  m.mmre = std::accumulate(mre.begin(), mre.end(), 0.0) / static_cast<double>(n);
  m.mdmre = stats::lower_median(mre);
  m.pred25 = static_cast<double>(std::count_if(mre.begin(), mre.end(), [](double e) { return e <= 0.25; })) /
             static_cast<double>(n);
  if (n > 1) {
    const double mean = std::accumulate(signed_error.begin(), signed_error.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double e : signed_error) ss += (e - mean) * (e - mean);
    m.consistency = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return m;
}

RandomSeed project_seed(RandomSeed master, std::string_view project_id) {
  return master.derive("project:" + std::string(project_id));
}

EvaluationReport loocv_evaluate(const CausalModel& model, std::span<const EvaluationCase> cases,
                                const LoocvOptions& options) {
  require_valid(model);
  EvaluationReport report;

  std::vector<const EvaluationCase*> usable;
  std::vector<OverheadDistribution> overheads;
  std::vector<double> means;
  for (const auto& c : cases) {
    if (!(c.size > 0.0) || !(c.effort > 0.0)) {
      report.excluded.emplace_back(c.project_id, "size and effort must be positive");
      continue;
    }
    try {
      auto dist = simulate_overhead(model, c.ratings, options.plan, project_seed(options.seed, c.project_id));
      means.push_back(mean_overhead(dist));
      overheads.push_back(std::move(dist));
      usable.push_back(&c);
    } catch (const std::exception& e) {
      report.excluded.emplace_back(c.project_id, e.what());
    }
  }
  if (usable.size() < 3) throw std::invalid_argument("leave-one-out evaluation needs at least 3 usable projects");

  std::vector<double> actuals;
  std::vector<double> estimates;
  for (std::size_t k = 0; k < usable.size(); ++k) {
    std::vector<CalibrationPoint> training;
    training.reserve(usable.size() - 1);
    for (std::size_t j = 0; j < usable.size(); ++j) {
      if (j == k) continue;
      training.push_back({usable[j]->project_id, usable[j]->size, usable[j]->effort, means[j]});
    }
    const auto fit = fit_nominal_productivity(training);
    ++report.fold_count;

    const auto& held_out = *usable[k];
    auto cost = cost_from_overhead(overheads[k], held_out.size, fit.nominal_productivity);
    const double estimate = point_estimate(cost, options.convention);
    report.projects.push_back({held_out.project_id, held_out.effort, estimate,
                               std::abs(held_out.effort - estimate) / held_out.effort,
                               (estimate - held_out.effort) / held_out.effort});
    actuals.push_back(held_out.effort);
    estimates.push_back(estimate);
    if (options.keep_distributions) report.distributions.emplace(held_out.project_id, std::move(cost));
  }
  report.metrics = accuracy_metrics(actuals, estimates);
  return report;
}

MissingDriverAnalysis suggest_missing_drivers(std::span<const Candidate> unused_candidates,
                                              std::span<const double> residuals, const RankingOptions& options) {
  MissingDriverAnalysis out;
  out.ranking = rank_cost_drivers(unused_candidates, residuals, options);
  for (const auto& entry : out.ranking.entries) {
    if (!entry.selected) continue;
    const bool size = entry.kind == CandidateKind::size;
    out.suggestions.push_back({size ? SuggestionKind::refine_size_metric : SuggestionKind::add_candidate_factor,
                               entry.id, "residual:" + entry.id,
                               size ? "size correlates with the overhead the model leaves unexplained"
                                    : "explains overhead the current model leaves unexplained"});
  }
  return out;
}

std::vector<PrePostFinding> compare_pre_post(const FactorRanking& ranking, const CausalModel& model,
                                             double rho_threshold) {
  std::vector<PrePostFinding> out;
  for (const auto& entry : ranking.entries) {
    const bool modeled = entry.kind == CandidateKind::factor && model.find_factor(entry.id) != nullptr;
    if (!entry.selected || modeled) continue;
    const auto kind =
        entry.kind == CandidateKind::size ? SuggestionKind::refine_size_metric : SuggestionKind::add_candidate_factor;
    out.push_back({PrePostFinding::Kind::unmodeled_significant,
                   entry.id,
                   entry.rho,
                   {kind, entry.id, "prepost:" + entry.id, "significant in the data but absent from the model"}});
  }
  for (const auto& factor : model.factors) {
    const auto* entry = ranking.find(factor.id);
    if (entry != nullptr && entry->rho && std::abs(*entry->rho) >= rho_threshold) continue;
    out.push_back({PrePostFinding::Kind::unsupported_factor,
                   factor.id,
                   entry != nullptr ? entry->rho : std::nullopt,
                   {SuggestionKind::re_elicit_ratings, factor.id, "prepost:" + factor.id,
                    "modeled factor without support in the project data"}});
  }
  return out;
}

}  // namespace cobra
