#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <set>
#include <tuple>

#include "cobra/io.hpp"
#include "cobra/synthetic.hpp"

namespace py = pybind11;
using namespace cobra;

namespace {

// Ratings in documents are as elicited; the engine stores 0 = nominal.
std::vector<ProjectRecord> load_data(const CausalModel& model, const std::string& csv) {
  return recode_project_ratings(model, io::parse_projects(csv));
}

IterationConfig make_config(std::size_t samples, const std::string& method, std::uint64_t seed, double theta,
                            double alpha, int delta, double association, std::size_t permutations,
                            const std::string& scope, double target_mmre, const std::string& estimate,
                            bool keep_distributions) {
  IterationConfig c;
  c.plan = {parse_sample_method(method), samples};
  c.seed = {seed};
  c.thresholds = {theta, alpha, delta, association};
  c.permutations = permutations;
  c.scope = parse_scope_policy(scope);
  c.target_mmre = target_mmre;
  c.convention = parse_estimate_convention(estimate);
  c.keep_distributions = keep_distributions;
  return c;
}

std::vector<double> estimate(const std::string& model_json, const RatingVector& ratings, double size,
                             double productivity, std::size_t samples, const std::string& method, std::uint64_t seed) {
  const auto model = io::parse_model(model_json);
  return estimate_cost(model, recode_ratings(model, ratings), size, productivity,
                       {parse_sample_method(method), samples}, RandomSeed{seed})
      .samples;
}

CostDistribution as_distribution(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  CostDistribution d;
  d.samples = std::move(samples);
  return d;
}

std::string analyze(const std::string& model_json, const std::string& csv, const IterationConfig& config) {
  const auto model = io::parse_model(model_json);
  return io::pre_modeling_to_json(run_pre_modeling(model, load_data(model, csv), config)).dump();
}

std::string evaluate(const std::string& model_json, const std::string& csv, const IterationConfig& config) {
  const auto model = io::parse_model(model_json);
  const auto projects = load_data(model, csv);
  const auto pre = run_pre_modeling(model, projects, config);
  LoocvOptions options{config.plan, config.seed, config.convention, config.keep_distributions};
  return io::evaluation_to_json(loocv_evaluate(model, evaluation_cases(pre, projects), options)).dump();
}

IterationReport iterate(const std::string& model_json, const std::string& csv, const IterationConfig& config) {
  const auto model = io::parse_model(model_json);
  return run_iteration(model, load_data(model, csv), config);
}

std::string apply(const std::string& csv, const std::string& report_json, const std::vector<std::string>& kinds) {
  const auto projects = io::parse_projects(csv);
  const auto report = nlohmann::json::parse(report_json);
  std::vector<RefinementSuggestion> suggestions;
  for (const auto& s : report.at("suggestions")) {
    suggestions.push_back({parse_suggestion_kind(s.at("kind").get<std::string>()), s.at("subject").get<std::string>(),
                           s.at("evidence").get<std::string>(), s.at("rationale").get<std::string>()});
  }
  std::set<SuggestionKind> selected;
  for (const auto& k : kinds) selected.insert(parse_suggestion_kind(k));
  const auto common = report.at("effort_scope").at("common_scope").get<std::set<std::string>>();
  return io::serialize_projects(apply_refinements(projects, suggestions, common, selected));
}

py::tuple synthesize(std::uint64_t seed, std::size_t projects, double noise, double productivity, std::size_t decoys,
                     bool outlier, std::size_t scope_defects, bool disagreeing_expert, const std::string& hidden_driver,
                     double hidden_strength) {
  SyntheticSpec spec;
  spec.model = default_synthetic_model();
  spec.seed = {seed};
  spec.project_count = projects;
  spec.noise = noise;
  spec.nominal_productivity = productivity;
  spec.defects.decoys = decoys;
  spec.defects.outlier = outlier;
  spec.defects.scope_defects = scope_defects;
  spec.defects.disagreeing_expert = disagreeing_expert;
  spec.defects.hidden_driver = hidden_driver;
  spec.defects.hidden_strength = hidden_strength;
  const auto data = generate_synthetic_dataset(spec);
  return py::make_tuple(io::serialize_model(spec.model), io::serialize_projects(data.projects));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Causal cost-estimation engine";

  py::register_exception<io::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<io::ModelValidationError>(m, "ModelValidationError", PyExc_ValueError);

  py::class_<IterationConfig>(m, "IterationConfig")
      .def(py::init(&make_config), py::arg("samples") = 10000, py::arg("method") = "lhs", py::arg("seed") = 0,
           py::arg("theta") = 0.3, py::arg("alpha") = 0.05, py::arg("delta") = 1, py::arg("association") = 0.7,
           py::arg("permutations") = 10000, py::arg("scope") = "modal", py::arg("target_mmre") = 0.20,
           py::arg("estimate") = "median", py::arg("keep_distributions") = false)
      .def_property_readonly("samples", [](const IterationConfig& c) { return c.plan.count; })
      .def_property_readonly("seed", [](const IterationConfig& c) { return c.seed.master; })
      .def("to_json", [](const IterationConfig& c) { return io::config_to_json(c).dump(); });

  py::class_<IterationReport>(m, "IterationReport")
      .def("to_json", [](const IterationReport& r) { return io::report_to_json(r).dump(); })
      .def("summary", &io::render_summary)
      .def("emit", &io::emit_report, py::arg("directory"))
      .def_property_readonly("mmre", [](const IterationReport& r) { return r.evaluation.metrics.mmre; })
      .def_property_readonly("stop", [](const IterationReport& r) { return r.stop.stop; });

  m.def(
      "triangular_inverse_cdf",
      [](double min, double likely, double max, double u) { return triangular_inverse_cdf({min, likely, max}, u); },
      py::arg("min"), py::arg("likely"), py::arg("max"), py::arg("u"));
  m.def(
      "validate_model",
      [](const std::string& model_json) {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        try {
          for (const auto& v : validate_model(io::parse_model(model_json)))
            out.emplace_back(v.rule, v.subject, v.message);
        } catch (const io::ModelValidationError& e) {
          for (const auto& v : e.violations()) out.emplace_back(v.rule, v.subject, v.message);
        }
        return out;
      },
      py::arg("model_json"), "Violations as (rule, subject, message); empty when the model is valid.");
  m.def(
      "normalize_model", [](const std::string& model_json) { return io::serialize_model(io::parse_model(model_json)); },
      py::arg("model_json"));
  m.def(
      "normalize_projects", [](const std::string& csv) { return io::serialize_projects(io::parse_projects(csv)); },
      py::arg("csv"));

  m.def("estimate", &estimate, py::arg("model_json"), py::arg("ratings"), py::arg("size"), py::arg("productivity"),
        py::arg("samples") = 10000, py::arg("method") = "lhs", py::arg("seed") = 0,
        "Sorted simulated effort samples of a new project.");
  m.def(
      "quantile",
      [](std::vector<double> samples, double p) { return quantile(as_distribution(std::move(samples)), p); },
      py::arg("samples"), py::arg("p"));
  m.def(
      "exceedance_probability",
      [](std::vector<double> samples, double budget) {
        return exceedance_probability(as_distribution(std::move(samples)), budget);
      },
      py::arg("samples"), py::arg("budget"));

  m.def("analyze", &analyze, py::arg("model_json"), py::arg("csv"), py::arg("config"));
  m.def("evaluate", &evaluate, py::arg("model_json"), py::arg("csv"), py::arg("config"));
  m.def("iterate", &iterate, py::arg("model_json"), py::arg("csv"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("apply", &apply, py::arg("csv"), py::arg("report_json"), py::arg("kinds"));
  m.def("synthesize", &synthesize, py::arg("seed") = 0, py::arg("projects") = 16, py::arg("noise") = 0.05,
        py::arg("productivity") = 0.5, py::arg("decoys") = 0, py::arg("outlier") = false, py::arg("scope_defects") = 0,
        py::arg("disagreeing_expert") = false, py::arg("hidden_driver") = "", py::arg("hidden_strength") = 0.0,
        "Default synthetic organization as (model JSON, project CSV).");
}
