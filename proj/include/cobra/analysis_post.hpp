#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cobra/analysis_pre.hpp"
#include "cobra/estimation.hpp"

namespace cobra {

struct ProjectEvaluation {
  std::string project_id;
  double actual = 0.0;
  double estimate = 0.0;
  double mre = 0.0;           // |actual - estimate| / actual
  double signed_error = 0.0;  // (estimate - actual) / actual
};

struct AccuracyMetrics {
  std::size_t n = 0;
  double mmre = 0.0;
  double mdmre = 0.0;        // lower median
  double pred25 = 0.0;       // fraction with MRE <= 0.25
  double consistency = 0.0;  // sample standard deviation of signed errors
};

struct EvaluationReport {
  std::vector<ProjectEvaluation> projects;
  AccuracyMetrics metrics;
  std::size_t fold_count = 0;
  std::vector<std::pair<std::string, std::string>> excluded;  // project id, reason
  std::map<std::string, CostDistribution> distributions;      // held-out cost distributions, if kept
};

AccuracyMetrics accuracy_metrics(std::span<const double> actuals, std::span<const double> estimates);

/// Project as seen by the evaluator: aggregated ratings and common-scope effort.
struct EvaluationCase {
  std::string project_id;
  double size = 0.0;
  double effort = 0.0;
  RatingVector ratings;
};

struct LoocvOptions {
  SamplePlan plan;
  RandomSeed seed;
  EstimateConvention convention = EstimateConvention::median;
  bool keep_distributions = false;
};

/// Seed of a project's simulation: a pure function of the master seed and project id.
RandomSeed project_seed(RandomSeed master, std::string_view project_id);

/// Leave-one-out: each project is estimated with nominal productivity fitted
/// on all other projects. Projects whose simulation fails are excluded and listed.
EvaluationReport loocv_evaluate(const CausalModel& model, std::span<const EvaluationCase> cases,
                                const LoocvOptions& options);

enum class SuggestionKind {
  remove_outlier,
  fix_effort_scope,
  re_elicit_ratings,
  add_candidate_factor,
  refine_size_metric,
};
std::string_view to_string(SuggestionKind kind);
SuggestionKind parse_suggestion_kind(std::string_view text);

struct RefinementSuggestion {
  SuggestionKind kind = SuggestionKind::add_candidate_factor;
  std::string subject;
  std::string evidence;  // reference of the finding that motivates it
  std::string rationale;

  bool operator==(const RefinementSuggestion&) const = default;
};

struct MissingDriverAnalysis {
  FactorRanking ranking;  // candidates against residual overhead
  std::vector<RefinementSuggestion> suggestions;
};

/// Ranks candidates not yet in the model against the residual overhead
/// (empirical CO minus model mean CO). Selected attributes become
/// add_candidate_factor suggestions; a selected size candidate becomes refine_size_metric.
MissingDriverAnalysis suggest_missing_drivers(std::span<const Candidate> unused_candidates,
                                              std::span<const double> residuals, const RankingOptions& options);

struct PrePostFinding {
  enum class Kind { unmodeled_significant, unsupported_factor };
  Kind kind = Kind::unmodeled_significant;
  std::string subject;
  std::optional<double> rho;
  RefinementSuggestion suggestion;
};

/// Disagreements between the data-driven ranking and the model structure.
std::vector<PrePostFinding> compare_pre_post(const FactorRanking& ranking, const CausalModel& model,
                                             double rho_threshold);

}  // namespace cobra
