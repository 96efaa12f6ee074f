#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cobra/estimation.hpp"
#include "cobra/pipeline.hpp"
#include "cobra/project.hpp"

namespace cobra::io {

/// Malformed input. `location` is "line L, column C" for text positions or a
/// JSON pointer such as "/factors/0/colour" for schema errors.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::string location);

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

/// Well-formed model document describing an invalid causal model.
class ModelValidationError : public std::runtime_error {
 public:
  explicit ModelValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Locale-independent shortest round-trip formatting.
std::string format_number(double value);

/// Locale-independent formatting with `significant` digits.
std::string format_significant(double value, int significant);

// Model documents (JSON).
CausalModel parse_model(std::string_view text);
std::string serialize_model(const CausalModel& model);
CausalModel load_model(const std::filesystem::path& path);
void save_model(const CausalModel& model, const std::filesystem::path& path);

// Project tables (CSV): project_id, size, effort_<phase>, factor_<id>_expert_<id>, attr_<name>.
std::vector<ProjectRecord> parse_projects(std::string_view text);
std::string serialize_projects(std::span<const ProjectRecord> projects);
std::vector<ProjectRecord> load_projects(const std::filesystem::path& path);
void save_projects(std::span<const ProjectRecord> projects, const std::filesystem::path& path);

/// Ratings document: JSON object {"factor_id": rating, ...}.
RatingVector parse_ratings(std::string_view text);

/// One "value,cumulative_probability" row per sample, 9 significant digits.
std::string format_cdf(const CostDistribution& dist);
void emit_cdf(const CostDistribution& dist, const std::filesystem::path& path);

/// File name of a project's CDF export; characters outside [A-Za-z0-9._-] become '_'.
std::string cdf_file_name(const std::string& project_id);

nlohmann::json config_to_json(const IterationConfig& config);
nlohmann::json pre_modeling_to_json(const PreModelingReport& pre);
nlohmann::json evaluation_to_json(const EvaluationReport& evaluation);

/// Full iteration report. Every suggestion's evidence is listed under "findings".
nlohmann::json report_to_json(const IterationReport& report);
std::string render_summary(const IterationReport& report);

/// Writes report.json, summary.txt and cdf/<project>.csv for every kept
/// held-out distribution into `directory`.
void emit_report(const IterationReport& report, const std::filesystem::path& directory);

}  // namespace cobra::io
