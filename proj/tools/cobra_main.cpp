// cobra: batch command-line front end of the cost-estimation engine.
//
// Exit codes: 0 success, 1 findings present under --strict, 2 usage or input error.

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cobra/io.hpp"
#include "cobra/synthetic.hpp"

namespace {

using nlohmann::json;

constexpr int kFindings = 1;
constexpr int kInputError = 2;

struct Options {
  std::string model;
  std::string data;
  std::string out;
  std::size_t samples = 10000;
  std::string method = "lhs";
  std::uint64_t seed = 0;
  bool strict = false;

  double theta = 0.3;
  double alpha = 0.05;
  int delta = 1;
  double association = 0.7;
  std::size_t permutations = 10000;
  std::string scope = "modal";
  double target_mmre = 0.20;
  std::string estimate = "median";
  bool no_cdf = false;

  std::optional<double> size;
  std::optional<double> productivity;
  std::string ratings_file;
  std::vector<std::string> ratings;
  std::optional<double> budget;
  std::optional<double> probability;

  std::size_t projects = 16;
  double noise = 0.05;
  double nominal = 0.5;
  std::size_t decoys = 0;
  bool outlier = false;
  std::size_t scope_defects = 0;
  bool disagreeing_expert = false;
  std::string hidden_driver;
  double hidden_strength = 0.0;

  std::string report;
  std::vector<std::string> kinds = {"remove_outlier", "fix_effort_scope"};
};

// Input problems detected after argument parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

cobra::IterationConfig iteration_config(const Options& o) {
  cobra::IterationConfig c;
  c.plan = {cobra::parse_sample_method(o.method), o.samples};
  c.seed = {o.seed};
  c.thresholds = {o.theta, o.alpha, o.delta, o.association};
  c.scope = cobra::parse_scope_policy(o.scope);
  c.target_mmre = o.target_mmre;
  c.convention = cobra::parse_estimate_convention(o.estimate);
  c.permutations = o.permutations;
  c.keep_distributions = !o.no_cdf;
  return c;
}

cobra::CausalModel load_model(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  return cobra::io::load_model(o.model);
}

// Ratings of '-' factors are stored reverse-coded from here on.
std::vector<cobra::ProjectRecord> load_data(const Options& o, const cobra::CausalModel& model) {
  if (o.data.empty()) throw UsageError("--data is required");
  return cobra::recode_project_ratings(model, cobra::io::load_projects(o.data));
}

cobra::RatingVector load_ratings(const Options& o, const cobra::CausalModel& model) {
  cobra::RatingVector ratings;
  if (!o.ratings_file.empty()) ratings = cobra::io::parse_ratings(cobra::io::read_file(o.ratings_file));
  for (const auto& item : o.ratings) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--rating expects factor=level, got '" + item + "'");
    try {
      std::size_t used = 0;
      const int level = std::stoi(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument(item);
      ratings[item.substr(0, eq)] = level;
    } catch (const std::logic_error&) {
      throw UsageError("--rating level must be an integer, got '" + item + "'");
    }
  }
  if (ratings.empty()) throw UsageError("ratings are required (--ratings FILE or --rating factor=level)");
  return cobra::recode_ratings(model, ratings);
}

void write_json(const Options& o, const std::string& name, const json& doc) {
  if (o.out.empty()) return;
  cobra::io::write_file_atomic(std::filesystem::path(o.out) / name, doc.dump(2) + "\n");
}

std::string num(double v) { return cobra::io::format_significant(v, 6); }

void print_findings(const cobra::DataQualityReport& report) {
  if (report.empty()) {
    std::cout << "no findings\n";
    return;
  }
  for (const auto& f : report.findings) {
    std::cout << "[" << cobra::to_string(f.category) << "] " << f.project_id << " " << f.field << ": " << f.message
              << "\n";
  }
}

int cmd_validate(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  const auto text = cobra::io::read_file(o.model);
  json doc;
  doc["model_violations"] = json::array();
  doc["data_quality"] = json::array();
  cobra::CausalModel model;
  try {
    model = cobra::io::parse_model(text);
  } catch (const cobra::io::ModelValidationError& e) {
    std::cout << e.what() << "\n";
    for (const auto& v : e.violations()) {
      doc["model_violations"].push_back({{"rule", v.rule}, {"subject", v.subject}, {"message", v.message}});
    }
    write_json(o, "validation.json", doc);
    return o.strict ? kFindings : 0;
  }
  std::cout << "model: valid (" << model.factors.size() << " factors)\n";
  if (o.data.empty()) {
    write_json(o, "validation.json", doc);
    return 0;
  }
  const auto projects = load_data(o, model);
  const auto report = cobra::validate_data(projects, model, {o.delta});
  std::cout << "data: " << projects.size() << " projects\n";
  print_findings(report);
  doc["data_quality"] = cobra::io::pre_modeling_to_json({.data_quality = report})["data_quality"];
  write_json(o, "validation.json", doc);
  return o.strict && !report.empty() ? kFindings : 0;
}

bool has_findings(const cobra::PreModelingReport& pre) {
  return !pre.data_quality.empty() || !pre.excluded.empty() || !pre.scope.deviating.empty() ||
         !pre.disagreement.flagged.empty() || !pre.outliers.outliers.flagged.empty() ||
         !pre.outliers.separators.separators.empty();
}

int cmd_analyze(const Options& o) {
  const auto model = load_model(o);
  const auto projects = load_data(o, model);
  const auto config = iteration_config(o);
  const auto pre = cobra::run_pre_modeling(model, projects, config);

  print_findings(pre.data_quality);
  for (const auto& [id, reason] : pre.excluded) std::cout << "excluded " << id << ": " << reason << "\n";
  for (const auto& id : pre.scope.deviating) std::cout << "effort scope deviates: " << id << "\n";
  for (const auto& c : pre.disagreement.flagged) {
    std::cout << "expert disagreement: " << c.project_id << "/" << c.factor_id << " range " << c.range << "\n";
  }
  std::cout << "nominal productivity: " << num(pre.calibration.nominal_productivity) << "\n";
  std::cout << "cost-driver ranking:\n";
  for (const auto& e : pre.ranking.entries) {
    std::cout << "  " << (e.selected ? "* " : "  ") << e.id << " rho=" << (e.rho ? num(*e.rho) : "n/a")
              << " p=" << num(e.p_value) << "\n";
  }
  for (const auto& a : pre.associations) {
    std::cout << "association: " << a.first << " ~ " << a.second << " rho=" << num(a.rho) << "\n";
  }
  for (const auto& f : pre.outliers.outliers.flagged) {
    std::cout << "outlier: " << f.project_id << " nominal productivity " << num(f.value) << "\n";
  }
  for (const auto& s : pre.outliers.separators.separators) {
    std::cout << "group separator: " << s.attribute << "=" << s.level << " p=" << num(s.p_value) << "\n";
  }

  json doc;
  doc["config"] = cobra::io::config_to_json(config);
  doc.update(cobra::io::pre_modeling_to_json(pre));
  write_json(o, "analysis.json", doc);
  return o.strict && has_findings(pre) ? kFindings : 0;
}

int cmd_calibrate(const Options& o) {
  const auto model = load_model(o);
  const auto projects = load_data(o, model);
  const auto config = iteration_config(o);
  const auto pre = cobra::run_pre_modeling(model, projects, config);
  const auto& cal = pre.calibration;
  std::cout << "nominal productivity: " << num(cal.nominal_productivity) << " size units per person-hour\n";
  std::cout << "project,nominal_productivity,residual\n";
  for (const auto& [id, p] : cal.per_project_nominal) {
    std::cout << id << "," << num(p) << "," << num(cal.residuals.at(id)) << "\n";
  }
  const auto full = cobra::io::pre_modeling_to_json(pre);
  json doc = {{"config", cobra::io::config_to_json(config)},
              {"calibration", full["calibration"]},
              {"excluded_projects", full["excluded_projects"]},
              {"effort_scope", full["effort_scope"]}};
  write_json(o, "calibration.json", doc);
  return o.strict && (!pre.data_quality.empty() || !pre.excluded.empty()) ? kFindings : 0;
}

// Cost distribution of the project described by --size and ratings; nominal
// productivity comes from --productivity or from calibrating on --data.
cobra::CostDistribution project_distribution(const Options& o, json& doc) {
  const auto model = load_model(o);
  if (!o.size) throw UsageError("--size is required");
  const auto ratings = load_ratings(o, model);
  const auto config = iteration_config(o);
  double productivity = 0.0;
  if (o.productivity) {
    productivity = *o.productivity;
  } else if (!o.data.empty()) {
    productivity = cobra::run_pre_modeling(model, load_data(o, model), config).calibration.nominal_productivity;
  } else {
    throw UsageError("--productivity or --data is required");
  }
  auto dist = cobra::estimate_cost(model, ratings, *o.size, productivity, config.plan, config.seed);
  doc["config"] = {{"samples", config.plan.count},
                   {"method", std::string(cobra::to_string(config.plan.method))},
                   {"seed", config.seed.master}};
  doc["size"] = *o.size;
  doc["nominal_productivity"] = productivity;
  doc["point_estimate"] = cobra::point_estimate(dist, config.convention);
  doc["estimate_convention"] = std::string(cobra::to_string(config.convention));
  doc["min"] = dist.samples.front();
  doc["max"] = dist.samples.back();
  json q = json::object();
  for (double p : {0.1, 0.5, 0.7, 0.9}) q[cobra::io::format_number(p)] = cobra::quantile(dist, p);
  doc["quantiles"] = q;
  doc["cdf"] = "cdf.csv";
  if (!o.out.empty()) cobra::io::emit_cdf(dist, std::filesystem::path(o.out) / "cdf.csv");
  return dist;
}

int cmd_estimate(const Options& o) {
  json doc;
  const auto dist = project_distribution(o, doc);
  std::cout << "nominal productivity: " << num(doc["nominal_productivity"].get<double>()) << "\n";
  std::cout << "point estimate (" << doc["estimate_convention"].get<std::string>()
            << "): " << num(doc["point_estimate"].get<double>()) << " person-hours\n";
  std::cout << "range: " << num(dist.samples.front()) << " .. " << num(dist.samples.back()) << "\n";
  for (const auto& [p, v] : doc["quantiles"].items())
    std::cout << "quantile " << p << ": " << num(v.get<double>()) << "\n";
  write_json(o, "estimate.json", doc);
  return 0;
}

int cmd_risk(const Options& o) {
  if (!o.budget && !o.probability) throw UsageError("--budget and/or --probability is required");
  if (o.probability && !(*o.probability >= 0.0 && *o.probability < 1.0)) {
    throw UsageError("--probability must be in [0, 1)");
  }
  json doc;
  const auto dist = project_distribution(o, doc);
  if (o.budget) {
    const double exceed = cobra::exceedance_probability(dist, *o.budget);
    std::cout << "budget " << num(*o.budget) << ": probability of staying within " << num(1.0 - exceed)
              << ", of overrunning " << num(exceed) << "\n";
    doc["budget"] = {{"budget", *o.budget}, {"exceedance_probability", exceed}, {"within_probability", 1.0 - exceed}};
  }
  if (o.probability) {
    const double budget = cobra::quantile(dist, 1.0 - *o.probability);
    std::cout << "tolerated overrun risk " << num(*o.probability) << ": plan a budget of " << num(budget)
              << " person-hours\n";
    doc["risk"] = {{"tolerated_overrun_probability", *o.probability}, {"budget", budget}};
  }
  write_json(o, "risk.json", doc);
  return 0;
}

int cmd_evaluate(const Options& o) {
  const auto model = load_model(o);
  const auto projects = load_data(o, model);
  const auto config = iteration_config(o);
  const auto pre = cobra::run_pre_modeling(model, projects, config);
  const auto cases = cobra::evaluation_cases(pre, projects);
  const auto ev =
      cobra::loocv_evaluate(model, cases, {config.plan, config.seed, config.convention, config.keep_distributions});
  std::cout << "project,actual,estimate,mre\n";
  for (const auto& p : ev.projects) {
    std::cout << p.project_id << "," << num(p.actual) << "," << num(p.estimate) << "," << num(p.mre) << "\n";
  }
  const auto& m = ev.metrics;
  std::cout << "folds " << ev.fold_count << "  MMRE " << num(m.mmre) << "  MdMRE " << num(m.mdmre) << "  Pred(0.25) "
            << num(m.pred25) << "  consistency " << num(m.consistency) << "\n";
  json doc = {{"config", cobra::io::config_to_json(config)}, {"evaluation", cobra::io::evaluation_to_json(ev)}};
  write_json(o, "evaluation.json", doc);
  if (!o.out.empty()) {
    for (const auto& [id, dist] : ev.distributions) {
      cobra::io::emit_cdf(dist, std::filesystem::path(o.out) / "cdf" / cobra::io::cdf_file_name(id));
    }
  }
  return o.strict && !ev.excluded.empty() ? kFindings : 0;
}

int cmd_iterate(const Options& o) {
  const auto model = load_model(o);
  const auto projects = load_data(o, model);
  const auto report = cobra::run_iteration(model, projects, iteration_config(o));
  std::cout << cobra::io::render_summary(report);
  if (!o.out.empty()) cobra::io::emit_report(report, o.out);
  return o.strict && (!report.suggestions.empty() || has_findings(report.pre)) ? kFindings : 0;
}

int cmd_synth(const Options& o) {
  if (o.out.empty()) throw UsageError("--out is required");
  cobra::SyntheticSpec spec;
  spec.model = cobra::default_synthetic_model();
  spec.nominal_productivity = o.nominal;
  spec.project_count = o.projects;
  spec.seed = {o.seed};
  spec.noise = o.noise;
  spec.defects.outlier = o.outlier;
  spec.defects.scope_defects = o.scope_defects;
  spec.defects.decoys = o.decoys;
  spec.defects.disagreeing_expert = o.disagreeing_expert;
  spec.defects.hidden_driver = o.hidden_driver;
  spec.defects.hidden_strength = o.hidden_strength;
  const auto data = cobra::generate_synthetic_dataset(spec);

  const std::filesystem::path dir(o.out);
  cobra::io::save_model(spec.model, dir / "model.json");
  cobra::io::save_projects(data.projects, dir / "projects.csv");
  const auto& t = data.truth;
  json truth = {{"nominal_productivity", t.nominal_productivity},
                {"overhead", t.overhead},
                {"effort", t.effort},
                {"outlier", t.outlier ? json(*t.outlier) : json(nullptr)},
                {"scope_defects", t.scope_defects},
                {"decoys", t.decoys},
                {"disagreement_cells", t.disagreement_cells}};
  cobra::io::write_file_atomic(dir / "truth.json", truth.dump(2) + "\n");
  std::cout << "wrote " << data.projects.size() << " projects to " << (dir / "projects.csv").string() << "\n";
  return 0;
}

// Applies selected suggestions of an iteration report to the raw dataset,
// producing a new revision; the input file is left untouched.
int cmd_apply(const Options& o) {
  if (o.data.empty()) throw UsageError("--data is required");
  if (o.report.empty()) throw UsageError("--report is required");
  if (o.out.empty()) throw UsageError("--out is required");
  const auto projects = cobra::io::load_projects(o.data);
  json report;
  try {
    report = json::parse(cobra::io::read_file(o.report));
  } catch (const json::exception& e) {
    throw cobra::io::ParseError(e.what(), o.report);
  }
  std::set<cobra::SuggestionKind> kinds;
  for (const auto& k : o.kinds) kinds.insert(cobra::parse_suggestion_kind(k));
  std::vector<cobra::RefinementSuggestion> suggestions;
  std::set<std::string> common_scope;
  try {
    for (const auto& s : report.at("suggestions")) {
      suggestions.push_back({cobra::parse_suggestion_kind(s.at("kind").get<std::string>()),
                             s.at("subject").get<std::string>(), s.at("evidence").get<std::string>(),
                             s.at("rationale").get<std::string>()});
    }
    common_scope = report.at("effort_scope").at("common_scope").get<std::set<std::string>>();
  } catch (const json::exception& e) {
    throw cobra::io::ParseError(std::string("not an iteration report: ") + e.what(), o.report);
  }
  const auto revised = cobra::apply_refinements(projects, suggestions, common_scope, kinds);
  for (const auto& s : suggestions) {
    if (kinds.count(s.kind) != 0) std::cout << "applied " << cobra::to_string(s.kind) << " " << s.subject << "\n";
  }
  cobra::io::save_projects(revised, std::filesystem::path(o.out) / "projects.csv");
  std::cout << "wrote " << revised.size() << " of " << projects.size() << " projects\n";
  return 0;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--model", o.model, "Causal model document (JSON)");
  app->add_option("--data", o.data, "Past-project table (CSV)");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--samples", o.samples, "Simulation sample count")->check(CLI::PositiveNumber);
  app->add_option("--method", o.method, "Sampling method")->check(CLI::IsMember({"mc", "lhs"}));
  app->add_option("--seed", o.seed, "Master random seed");
  app->add_flag("--strict", o.strict, "Exit with 1 when findings are present");
}

void add_analysis(CLI::App* app, Options& o) {
  app->add_option("--theta", o.theta, "Minimum |rho| of a selected driver")->check(CLI::Range(0.0, 1.0));
  app->add_option("--alpha", o.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  app->add_option("--delta", o.delta, "Tolerated inter-expert rating range")->check(CLI::NonNegativeNumber);
  app->add_option("--association", o.association, "|rho| flagging associated drivers")->check(CLI::Range(0.0, 1.0));
  app->add_option("--permutations", o.permutations, "Monte Carlo permutations for large-n tests")
      ->check(CLI::PositiveNumber);
  app->add_option("--scope", o.scope, "Effort scope policy: modal, as-recorded or phases=a,b");
  app->add_option("--target-mmre", o.target_mmre, "Stop when LOOCV MMRE is at most this");
  app->add_option("--estimate", o.estimate, "Point estimate")->check(CLI::IsMember({"median", "mean"}));
}

void add_project(CLI::App* app, Options& o) {
  app->add_option("--size", o.size, "Project size")->check(CLI::PositiveNumber);
  app->add_option("--productivity", o.productivity, "Nominal productivity (otherwise calibrated on --data)")
      ->check(CLI::PositiveNumber);
  app->add_option("--ratings", o.ratings_file, "Ratings document (JSON object factor -> level)");
  app->add_option("--rating", o.ratings, "Inline rating factor=level (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid causal cost-estimation engine"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "Check a model and a project table");
  add_common(validate, o);
  validate->add_option("--delta", o.delta, "Tolerated inter-expert rating range")->check(CLI::NonNegativeNumber);

  auto* analyze = app.add_subcommand("analyze", "Pre-modeling analysis");
  add_common(analyze, o);
  add_analysis(analyze, o);

  auto* calibrate = app.add_subcommand("calibrate", "Fit nominal productivity");
  add_common(calibrate, o);
  add_analysis(calibrate, o);

  auto* estimate = app.add_subcommand("estimate", "Cost distribution of a new project");
  add_common(estimate, o);
  add_analysis(estimate, o);
  add_project(estimate, o);

  auto* risk = app.add_subcommand("risk", "Budget and overrun-risk queries");
  add_common(risk, o);
  add_analysis(risk, o);
  add_project(risk, o);
  risk->add_option("--budget", o.budget, "Probability of staying within this budget");
  risk->add_option("--probability", o.probability, "Budget for this tolerated overrun probability");

  auto* evaluate = app.add_subcommand("evaluate", "Leave-one-out accuracy");
  add_common(evaluate, o);
  add_analysis(evaluate, o);
  evaluate->add_flag("--no-cdf", o.no_cdf, "Skip per-project CDF exports");

  auto* iterate = app.add_subcommand("iterate", "One full refinement iteration");
  add_common(iterate, o);
  add_analysis(iterate, o);
  iterate->add_flag("--no-cdf", o.no_cdf, "Skip per-project CDF exports");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic organization");
  add_common(synth, o);
  synth->add_option("--projects", o.projects, "Project count")->check(CLI::PositiveNumber);
  synth->add_option("--noise", o.noise, "Multiplicative effort noise")->check(CLI::Range(0.0, 0.99));
  synth->add_option("--productivity", o.nominal, "True nominal productivity")->check(CLI::PositiveNumber);
  synth->add_option("--decoys", o.decoys, "Pure-noise numeric attributes");
  synth->add_flag("--outlier", o.outlier, "Plant one effort outlier");
  synth->add_option("--scope-defects", o.scope_defects, "Projects with an unmeasured phase");
  synth->add_flag("--disagreeing-expert", o.disagreeing_expert, "Add a contradicting expert");
  synth->add_option("--hidden-driver", o.hidden_driver, "Unmodeled attribute driving effort");
  synth->add_option("--hidden-strength", o.hidden_strength, "Effect of the hidden driver");

  auto* apply = app.add_subcommand("apply", "Apply report suggestions to a dataset, writing a new revision");
  add_common(apply, o);
  apply->add_option("--report", o.report, "report.json of an iteration");
  apply->add_option("--kinds", o.kinds, "Suggestion kinds to apply")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kInputError;
  }

  const std::map<CLI::App*, int (*)(const Options&)> verbs = {
      {validate, cmd_validate}, {analyze, cmd_analyze}, {calibrate, cmd_calibrate},
      {estimate, cmd_estimate}, {risk, cmd_risk},       {evaluate, cmd_evaluate},
      {iterate, cmd_iterate},   {synth, cmd_synth},     {apply, cmd_apply}};
  try {
    for (const auto& [sub, run] : verbs) {
      if (sub->parsed()) return run(o);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
  } catch (const cobra::io::ModelValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const cobra::io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kInputError;
}
