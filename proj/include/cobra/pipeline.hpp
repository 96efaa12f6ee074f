#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cobra/analysis_post.hpp"
#include "cobra/analysis_pre.hpp"
#include "cobra/calibration.hpp"

namespace cobra {

struct Thresholds {
  double rho = 0.3;          // |rho| needed to select a driver
  double alpha = 0.05;       // significance level
  int disagreement = 1;      // tolerated inter-expert rating range
  double association = 0.7;  // |rho| flagging an interaction/redundancy pair
};

struct IterationConfig {
  SamplePlan plan;
  RandomSeed seed;
  Thresholds thresholds;
  ScopePolicy scope;
  double target_mmre = 0.20;
  EstimateConvention convention = EstimateConvention::median;
  std::size_t permutations = 10000;
  bool keep_distributions = false;
};

struct StopDecision {
  bool stop = false;
  double mmre = 0.0;
  double target = 0.0;
  std::string rationale;
};

/// Everything computed before the model is evaluated.
struct PreModelingReport {
  DataQualityReport data_quality;
  std::vector<std::pair<std::string, std::string>> excluded;  // project id, reason
  EffortScope scope;
  DisagreementReport disagreement;
  std::map<std::string, double> model_overhead;  // mean simulated CO per project
  CalibrationResult calibration;
  std::map<std::string, double> empirical_overhead;  // data-implied CO per project
  FactorRanking ranking;
  std::vector<Association> associations;
  OutlierReport outliers;
};

struct IterationReport {
  IterationConfig config;
  PreModelingReport pre;
  EvaluationReport evaluation;
  MissingDriverAnalysis missing_drivers;
  std::vector<PrePostFinding> pre_post;
  std::vector<RefinementSuggestion> suggestions;
  StopDecision stop;
};

/// Validation, scope harmonization, rating aggregation, calibration, driver
/// ranking and outlier analysis. Throws if fewer than 3 projects are usable.
PreModelingReport run_pre_modeling(const CausalModel& model, std::span<const ProjectRecord> projects,
                                   const IterationConfig& config);

/// One full refinement iteration. Inputs are never modified; suggestions are
/// recommendations only.
IterationReport run_iteration(const CausalModel& model, std::span<const ProjectRecord> projects,
                              const IterationConfig& config);

/// Stop when MMRE <= target.
StopDecision check_stop_criterion(const EvaluationReport& evaluation, const IterationConfig& config);

/// References of every finding in the report that a suggestion may cite.
std::set<std::string> finding_references(const IterationReport& report);

/// Evaluation inputs (aggregated ratings, common-scope effort) of the usable projects.
std::vector<EvaluationCase> evaluation_cases(const PreModelingReport& pre, std::span<const ProjectRecord> projects);

/// New dataset revision with the selected suggestion kinds applied:
/// remove_outlier drops the project, fix_effort_scope keeps only `common_scope` phases.
/// Other kinds need human action and are not applied.
std::vector<ProjectRecord> apply_refinements(std::span<const ProjectRecord> projects,
                                             std::span<const RefinementSuggestion> suggestions,
                                             const std::set<std::string>& common_scope,
                                             const std::set<SuggestionKind>& kinds);

}  // namespace cobra
