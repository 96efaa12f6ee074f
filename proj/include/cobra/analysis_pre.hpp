#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cobra/project.hpp"
#include "cobra/random.hpp"
#include "cobra/rank_stats.hpp"

// Pre-modeling analysis: data validation, effort-scope harmonization,
// cost-driver ranking, outliers and expert disagreement.
namespace cobra {

enum class FindingCategory { completeness, consistency, correctness };
std::string_view to_string(FindingCategory category);

struct DataFinding {
  FindingCategory category = FindingCategory::completeness;
  std::string project_id;
  std::string field;
  std::string message;
};

struct DataQualityReport {
  std::vector<DataFinding> findings;

  bool empty() const { return findings.empty(); }
};

struct ValidationOptions {
  int disagreement_threshold = 1;  // max tolerated inter-expert rating range
};

DataQualityReport validate_data(std::span<const ProjectRecord> projects, const CausalModel& model,
                                const ValidationOptions& options = {});

enum class ScopePolicyKind {
  modal,            // common scope of all projects; majority phases define deviants
  explicit_phases,  // caller-given phase set
  as_recorded,      // raw totals over whatever was measured; deviants still reported
};

struct ScopePolicy {
  ScopePolicyKind kind = ScopePolicyKind::modal;
  std::set<std::string> phases;  // explicit_phases only
};

/// "modal", "as-recorded" or "phases=a,b,c".
ScopePolicy parse_scope_policy(std::string_view text);
std::string to_string(const ScopePolicy& policy);

struct EffortScope {
  ScopePolicy policy;
  std::set<std::string> expected_phases;  // measured in a strict majority (or the explicit set)
  std::set<std::string> common_scope;     // phases summed into totals
  std::map<std::string, double> totals;
  std::vector<std::string> deviating;  // projects lacking an expected phase
  std::map<std::string, std::set<std::string>> missing_phases;
};

/// Phases measured by a strict majority of projects.
std::set<std::string> majority_phases(std::span<const ProjectRecord> projects);

/// Throws std::invalid_argument if no project is given or the common scope is empty.
EffortScope harmonize_effort_scope(std::span<const ProjectRecord> projects, const ScopePolicy& policy);

/// Data-implied cost overhead: effort * nominal_productivity / size - 1.
double empirical_overhead(double effort, double size, double nominal_productivity);

enum class CandidateKind { factor, attribute, size };
std::string_view to_string(CandidateKind kind);

/// Per-project values of one candidate driver; NaN marks a missing value.
struct Candidate {
  std::string id;
  CandidateKind kind = CandidateKind::attribute;
  std::vector<double> values;
};

struct RankingEntry {
  std::string id;
  CandidateKind kind = CandidateKind::attribute;
  std::optional<double> rho;
  double p_value = 1.0;
  bool exact = false;
  bool selected = false;
  std::size_t n = 0;
  std::string diagnostic;
};

/// Ordered by |rho| descending; undefined correlations last.
struct FactorRanking {
  std::vector<RankingEntry> entries;

  const RankingEntry* find(std::string_view id) const;
};

struct RankingOptions {
  double rho_threshold = 0.3;
  double alpha = 0.05;
  std::size_t permutations = 10000;
  RandomSeed seed;
};

/// Spearman rank correlation of each candidate with the target plus a
/// permutation p-value; selected iff |rho| >= threshold and p <= alpha.
/// Throws std::invalid_argument with fewer than 4 target values.
FactorRanking rank_cost_drivers(std::span<const Candidate> candidates, std::span<const double> target,
                                const RankingOptions& options = {});

struct Association {
  std::string first;
  std::string second;
  double rho = 0.0;
};

/// Unordered candidate pairs with |rho| >= threshold (interaction or redundancy suspects).
std::vector<Association> detect_factor_associations(std::span<const Candidate> candidates, double threshold);

struct OutlierFlag {
  std::string project_id;
  double value = 0.0;
};

struct OutlierResult {
  stats::TukeyFences fences;
  std::vector<OutlierFlag> flagged;
};

/// Tukey-fence outliers. Needs at least 4 values.
OutlierResult detect_outliers(std::span<const std::string> ids, std::span<const double> values);

struct GroupSeparator {
  std::string attribute;
  std::string level;  // projects with this level form the group
  std::vector<std::string> members;
  double statistic = 0.0;
  double p_value = 1.0;
};

struct SeparatorScan {
  std::vector<GroupSeparator> separators;  // p <= alpha, ascending p
  std::vector<std::string> diagnostics;
};

/// Exact rank-sum test of `target` between the two sides of every split
/// induced by a categorical attribute (one split for two levels, one-vs-rest otherwise).
SeparatorScan find_group_separators(std::span<const ProjectRecord> projects,
                                    const std::map<std::string, double>& target, double alpha);

struct OutlierReport {
  OutlierResult outliers;
  SeparatorScan separators;
};

struct DisagreementCell {
  std::string project_id;
  std::string factor_id;
  std::vector<int> ratings;  // one per expert, expert-id order
  int range = 0;
  int aggregated = 0;
};

struct DisagreementReport {
  std::vector<DisagreementCell> flagged;           // range > threshold
  std::map<std::string, RatingVector> aggregated;  // project -> lower-median ratings
  std::vector<DataFinding> unrated;                // cells nobody rated
};

DisagreementReport assess_expert_disagreement(std::span<const ProjectRecord> projects, const CausalModel& model,
                                              int threshold);

}  // namespace cobra
