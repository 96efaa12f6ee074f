#include <sstream>

#include "cobra/io.hpp"

namespace cobra::io {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json ranking_json(const FactorRanking& ranking, const std::string& ref_prefix) {
  json out = json::array();
  for (const auto& e : ranking.entries) {
    json entry = {{"id", e.id},
                  {"kind", std::string(to_string(e.kind))},
                  {"rho", optional_number(e.rho)},
                  {"p_value", e.p_value},
                  {"exact", e.exact},
                  {"selected", e.selected},
                  {"n", e.n},
                  {"diagnostic", e.diagnostic}};
    if (!ref_prefix.empty()) entry["ref"] = ref_prefix + e.id;
    out.push_back(std::move(entry));
  }
  return out;
}

std::string num(double v) { return format_significant(v, 4); }

}  // namespace

std::string cdf_file_name(const std::string& project_id) {
  std::string out;
  for (char c : project_id) {
    const bool plain =
        (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out += plain ? c : '_';
  }
  return (out.empty() ? "_" : out) + ".csv";
}

json config_to_json(const IterationConfig& cfg) {
  return {{"samples", cfg.plan.count},
          {"method", std::string(to_string(cfg.plan.method))},
          {"seed", cfg.seed.master},
          {"theta", cfg.thresholds.rho},
          {"alpha", cfg.thresholds.alpha},
          {"delta", cfg.thresholds.disagreement},
          {"association_threshold", cfg.thresholds.association},
          {"scope_policy", to_string(cfg.scope)},
          {"target_mmre", cfg.target_mmre},
          {"estimate", std::string(to_string(cfg.convention))},
          {"permutations", cfg.permutations}};
}

json pre_modeling_to_json(const PreModelingReport& pre) {
  json doc;
  doc["data_quality"] = json::array();
  for (const auto& f : pre.data_quality.findings) {
    doc["data_quality"].push_back({{"category", std::string(to_string(f.category))},
                                   {"project", f.project_id},
                                   {"field", f.field},
                                   {"message", f.message}});
  }
  doc["excluded_projects"] = json::array();
  for (const auto& [id, reason] : pre.excluded)
    doc["excluded_projects"].push_back({{"project", id}, {"reason", reason}});

  json deviating = json::array();
  for (const auto& id : pre.scope.deviating) {
    deviating.push_back({{"ref", "scope:" + id}, {"project", id}, {"missing_phases", pre.scope.missing_phases.at(id)}});
  }
  doc["effort_scope"] = {{"policy", to_string(pre.scope.policy)},
                         {"expected_phases", pre.scope.expected_phases},
                         {"common_scope", pre.scope.common_scope},
                         {"deviating", deviating},
                         {"totals", pre.scope.totals}};

  json flagged_cells = json::array();
  for (const auto& c : pre.disagreement.flagged) {
    flagged_cells.push_back({{"ref", "disagreement:" + c.project_id + "/" + c.factor_id},
                             {"project", c.project_id},
                             {"factor", c.factor_id},
                             {"ratings", c.ratings},
                             {"range", c.range},
                             {"aggregated", c.aggregated}});
  }
  doc["expert_disagreement"] = {{"flagged", flagged_cells}, {"aggregated_ratings", pre.disagreement.aggregated}};

  json per_project = json::object();
  for (const auto& [id, nominal] : pre.calibration.per_project_nominal) {
    per_project[id] = {{"nominal_productivity", nominal},
                       {"residual", pre.calibration.residuals.at(id)},
                       {"model_overhead", pre.model_overhead.at(id)},
                       {"empirical_overhead", pre.empirical_overhead.at(id)}};
  }
  doc["calibration"] = {{"nominal_productivity", pre.calibration.nominal_productivity},
                        {"regression_slope", pre.calibration.regression_slope},
                        {"projects", per_project}};

  doc["ranking"] = ranking_json(pre.ranking, "");
  doc["associations"] = json::array();
  for (const auto& a : pre.associations) {
    doc["associations"].push_back({{"first", a.first}, {"second", a.second}, {"rho", a.rho}});
  }

  const auto& fences = pre.outliers.outliers.fences;
  json outliers = json::array();
  for (const auto& f : pre.outliers.outliers.flagged) {
    outliers.push_back(
        {{"ref", "outlier:" + f.project_id}, {"project", f.project_id}, {"nominal_productivity", f.value}});
  }
  doc["outliers"] = {{"fences",
                      {{"lower_hinge", fences.lower_hinge},
                       {"upper_hinge", fences.upper_hinge},
                       {"lower_fence", fences.lower_fence},
                       {"upper_fence", fences.upper_fence}}},
                     {"flagged", outliers}};

  json separators = json::array();
  for (const auto& s : pre.outliers.separators.separators) {
    separators.push_back({{"ref", "separator:" + s.attribute + "=" + s.level},
                          {"attribute", s.attribute},
                          {"level", s.level},
                          {"members", s.members},
                          {"rank_sum", s.statistic},
                          {"p_value", s.p_value}});
  }
  doc["group_separators"] = {{"separators", separators}, {"diagnostics", pre.outliers.separators.diagnostics}};
  return doc;
}

json evaluation_to_json(const EvaluationReport& ev) {
  json evaluated = json::array();
  for (const auto& p : ev.projects) {
    evaluated.push_back({{"project", p.project_id},
                         {"actual", p.actual},
                         {"estimate", p.estimate},
                         {"mre", p.mre},
                         {"signed_error", p.signed_error}});
  }
  json ev_excluded = json::array();
  for (const auto& [id, reason] : ev.excluded) ev_excluded.push_back({{"project", id}, {"reason", reason}});
  json doc = {{"fold_count", ev.fold_count},
              {"metrics",
               {{"n", ev.metrics.n},
                {"mmre", ev.metrics.mmre},
                {"mdmre", ev.metrics.mdmre},
                {"pred25", ev.metrics.pred25},
                {"consistency", ev.metrics.consistency}}},
              {"projects", evaluated},
              {"excluded", ev_excluded}};

  json exports = json::object();
  for (const auto& [id, _] : ev.distributions) exports[id] = "cdf/" + cdf_file_name(id);
  doc["cdf_exports"] = exports;
  return doc;
}

json report_to_json(const IterationReport& report) {
  json doc;
  doc["config"] = config_to_json(report.config);
  doc.update(pre_modeling_to_json(report.pre));
  doc["evaluation"] = evaluation_to_json(report.evaluation);
  doc["residual_ranking"] = ranking_json(report.missing_drivers.ranking, "residual:");
  doc["pre_post"] = json::array();
  for (const auto& f : report.pre_post) {
    doc["pre_post"].push_back({{"ref", "prepost:" + f.subject},
                               {"kind", f.kind == PrePostFinding::Kind::unmodeled_significant ? "unmodeled_significant"
                                                                                              : "unsupported_factor"},
                               {"subject", f.subject},
                               {"rho", optional_number(f.rho)}});
  }

  doc["findings"] = finding_references(report);
  doc["suggestions"] = json::array();
  for (const auto& s : report.suggestions) {
    doc["suggestions"].push_back({{"kind", std::string(to_string(s.kind))},
                                  {"subject", s.subject},
                                  {"evidence", s.evidence},
                                  {"rationale", s.rationale}});
  }
  doc["stop"] = {{"stop", report.stop.stop},
                 {"mmre", report.stop.mmre},
                 {"target", report.stop.target},
                 {"rationale", report.stop.rationale}};
  return doc;
}

std::string render_summary(const IterationReport& report) {
  const auto& pre = report.pre;
  std::ostringstream os;
  os << "Refinement iteration summary\n"
     << "============================\n\n";

  os << "Data quality\n";
  if (pre.data_quality.empty() && pre.excluded.empty()) {
    os << "  no findings\n";
  } else {
    for (const auto& f : pre.data_quality.findings) {
      os << "  [" << to_string(f.category) << "] " << f.project_id << " " << f.field << ": " << f.message << "\n";
    }
    for (const auto& [id, reason] : pre.excluded) os << "  excluded " << id << ": " << reason << "\n";
  }

  os << "\nEffort scope (" << to_string(pre.scope.policy) << ")\n  common phases:";
  for (const auto& p : pre.scope.common_scope) os << " " << p;
  os << "\n";
  for (const auto& id : pre.scope.deviating) os << "  deviating project " << id << "\n";

  os << "\nCalibration\n  nominal productivity: " << num(pre.calibration.nominal_productivity)
     << " size units per person-hour\n";

  os << "\nCost-driver ranking (|rho| >= " << num(report.config.thresholds.rho)
     << ", p <= " << num(report.config.thresholds.alpha) << ")\n";
  if (pre.ranking.entries.empty()) os << "  not computed\n";
  for (const auto& e : pre.ranking.entries) {
    os << "  " << (e.selected ? "* " : "  ") << e.id << " rho=" << (e.rho ? num(*e.rho) : std::string("n/a"))
       << " p=" << num(e.p_value);
    if (!e.diagnostic.empty()) os << " (" << e.diagnostic << ")";
    os << "\n";
  }

  os << "\nOutliers\n";
  if (pre.outliers.outliers.flagged.empty()) os << "  none\n";
  for (const auto& f : pre.outliers.outliers.flagged) {
    os << "  " << f.project_id << " nominal productivity " << num(f.value) << "\n";
  }
  for (const auto& s : pre.outliers.separators.separators) {
    os << "  group " << s.attribute << "=" << s.level << " differs (p=" << num(s.p_value) << ")\n";
  }

  const auto& m = report.evaluation.metrics;
  os << "\nLeave-one-out evaluation (" << report.evaluation.fold_count << " folds)\n"
     << "  MMRE        " << num(m.mmre) << "\n"
     << "  MdMRE       " << num(m.mdmre) << "\n"
     << "  Pred(0.25)  " << num(m.pred25) << "\n"
     << "  consistency " << num(m.consistency) << "\n";

  os << "\nSuggestions\n";
  if (report.suggestions.empty()) os << "  no findings\n";
  for (const auto& s : report.suggestions) {
    os << "  " << to_string(s.kind) << " " << s.subject << " [evidence " << s.evidence << "]: " << s.rationale << "\n";
  }

  os << "\nDecision: " << (report.stop.stop ? "stop" : "continue") << " (" << report.stop.rationale << ")\n";
  return os.str();
}

void emit_report(const IterationReport& report, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  write_file_atomic(directory / "report.json", report_to_json(report).dump(2) + "\n");
  write_file_atomic(directory / "summary.txt", render_summary(report));
  for (const auto& [id, dist] : report.evaluation.distributions) {
    emit_cdf(dist, directory / "cdf" / cdf_file_name(id));
  }
}

}  // namespace cobra::io
