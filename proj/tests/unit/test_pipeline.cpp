#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cobra/io.hpp"
#include "cobra/pipeline.hpp"
#include "cobra/synthetic.hpp"
#include "support.hpp"

using namespace cobra;
using cobra::test::one_factor_model;
using cobra::test::point;

namespace {

IterationConfig quick_config(std::uint64_t seed = 0) {
  IterationConfig c;
  c.plan = {SampleMethod::latin_hypercube, 500};
  c.seed = {seed};
  c.permutations = 2000;
  return c;
}

SyntheticSpec clean_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.model = default_synthetic_model();
  s.seed = {seed};
  return s;
}

bool suggests(const IterationReport& r, SuggestionKind kind, const std::string& subject) {
  return std::any_of(r.suggestions.begin(), r.suggestions.end(),
                     [&](const RefinementSuggestion& s) { return s.kind == kind && s.subject == subject; });
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("stop criterion") {
    const auto config = quick_config();
    EvaluationReport ev;
    ev.metrics.mmre = 0.14;
    CHECK(check_stop_criterion(ev, config).stop);
    ev.metrics.mmre = 1.20;
    CHECK_FALSE(check_stop_criterion(ev, config).stop);
    ev.metrics.mmre = 0.20;
    CHECK(check_stop_criterion(ev, config).stop);
    CHECK_FALSE(check_stop_criterion(ev, config).rationale.empty());
  }

  TEST_CASE("noiseless synthetic data recovers nominal productivity") {
    auto spec = clean_spec(1);
    spec.nominal_productivity = 0.731;
    const auto data = generate_synthetic_dataset(spec);
    std::vector<CalibrationPoint> pts;
    for (const auto& p : data.projects) {
      pts.push_back({p.id, *p.size, p.recorded_effort(), data.truth.overhead.at(p.id)});
    }
    const auto fit = fit_nominal_productivity(pts);
    CHECK(std::abs(fit.nominal_productivity - 0.731) / 0.731 <= 1e-9);
  }

  TEST_CASE("synthetic defects leave the base data unchanged") {
    auto spec = clean_spec(2);
    const auto clean = generate_synthetic_dataset(spec);
    spec.defects.decoys = 3;
    spec.defects.outlier = true;
    const auto dirty = generate_synthetic_dataset(spec);
    REQUIRE(dirty.truth.outlier.has_value());
    for (std::size_t i = 0; i < clean.projects.size(); ++i) {
      CHECK(clean.projects[i].size == dirty.projects[i].size);
      CHECK(clean.projects[i].ratings == dirty.projects[i].ratings);
      if (clean.projects[i].id != *dirty.truth.outlier) {
        CHECK(clean.projects[i].phase_efforts == dirty.projects[i].phase_efforts);
      }
    }
  }

  TEST_CASE("clean noiseless data gives a clean report") {
    SyntheticSpec spec;
    spec.model = one_factor_model(point(0.4));
    spec.seed = {3};
    const auto data = generate_synthetic_dataset(spec);
    const auto r = run_iteration(spec.model, data.projects, quick_config());
    CHECK(r.evaluation.metrics.mmre <= 1e-12);
    CHECK(r.evaluation.fold_count == data.projects.size());
    CHECK(r.suggestions.empty());
    CHECK(r.stop.stop);
  }

  TEST_CASE("planted outlier is flagged and suggested for removal") {
    auto spec = clean_spec(4);
    spec.noise = 0.05;
    spec.defects.outlier = true;
    const auto data = generate_synthetic_dataset(spec);
    const auto r = run_iteration(spec.model, data.projects, quick_config());
    CHECK(suggests(r, SuggestionKind::remove_outlier, *data.truth.outlier));
  }

  TEST_CASE("attribute driving residuals becomes a candidate factor") {
    auto spec = clean_spec(5);
    spec.defects.hidden_driver = "gui_size";
    spec.defects.hidden_strength = 1.5;
    const auto data = generate_synthetic_dataset(spec);
    const auto r = run_iteration(spec.model, data.projects, quick_config());
    CHECK(suggests(r, SuggestionKind::add_candidate_factor, "gui_size"));
  }

  TEST_CASE("scope defects and expert disagreement are reported") {
    auto spec = clean_spec(6);
    spec.defects.scope_defects = 2;
    spec.defects.disagreeing_expert = true;
    const auto data = generate_synthetic_dataset(spec);
    const auto r = run_iteration(spec.model, data.projects, quick_config());
    for (const auto& id : data.truth.scope_defects) CHECK(suggests(r, SuggestionKind::fix_effort_scope, id));
    REQUIRE_FALSE(data.truth.disagreement_cells.empty());
    for (const auto& [pid, fid] : data.truth.disagreement_cells) {
      CHECK(suggests(r, SuggestionKind::re_elicit_ratings, pid + "/" + fid));
    }
  }

  TEST_CASE("every suggestion cites a finding in the report") {
    auto spec = clean_spec(7);
    spec.noise = 0.05;
    spec.defects = {true, 4.0, 3, "req", 4, true, "gui_size", 1.0};
    const auto data = generate_synthetic_dataset(spec);
    const auto r = run_iteration(spec.model, data.projects, quick_config());
    const auto refs = finding_references(r);
    REQUIRE_FALSE(r.suggestions.empty());
    for (const auto& s : r.suggestions) CHECK(refs.count(s.evidence) == 1);
  }

  TEST_CASE("iterations are idempotent and never mutate inputs") {
    auto spec = clean_spec(8);
    spec.noise = 0.05;
    spec.defects.outlier = true;
    spec.defects.decoys = 2;
    const auto data = generate_synthetic_dataset(spec);
    const auto projects = data.projects;
    const auto model = spec.model;
    const auto a = io::report_to_json(run_iteration(model, projects, quick_config(9))).dump();
    const auto b = io::report_to_json(run_iteration(model, projects, quick_config(9))).dump();
    CHECK(a == b);
    CHECK(projects == data.projects);
    CHECK(model == spec.model);
  }

  TEST_CASE("applying refinements writes a new revision") {
    auto spec = clean_spec(10);
    spec.defects.outlier = true;
    spec.defects.scope_defects = 2;
    const auto data = generate_synthetic_dataset(spec);
    const std::vector<RefinementSuggestion> suggestions{
        {SuggestionKind::remove_outlier, *data.truth.outlier, "outlier:" + *data.truth.outlier, ""},
        {SuggestionKind::fix_effort_scope, data.truth.scope_defects[0], "scope:x", ""},
        {SuggestionKind::re_elicit_ratings, "P01/team_capability", "disagreement:x", ""}};
    const std::set<std::string> common{"impl", "test"};

    const auto only_outlier = apply_refinements(data.projects, suggestions, common, {SuggestionKind::remove_outlier});
    CHECK(only_outlier.size() == data.projects.size() - 1);
    CHECK(std::none_of(only_outlier.begin(), only_outlier.end(),
                       [&](const ProjectRecord& p) { return p.id == *data.truth.outlier; }));
    const auto kept_req = std::count_if(only_outlier.begin(), only_outlier.end(),
                                        [](const ProjectRecord& p) { return p.phase_efforts.count("req") == 1; });
    CHECK(kept_req == static_cast<std::ptrdiff_t>(only_outlier.size() - data.truth.scope_defects.size()));

    const auto both = apply_refinements(data.projects, suggestions, common,
                                        {SuggestionKind::remove_outlier, SuggestionKind::fix_effort_scope});
    for (const auto& p : both) {
      std::set<std::string> phases;
      for (const auto& [ph, _] : p.phase_efforts) phases.insert(ph);
      CHECK(phases == common);
    }

    const auto none = apply_refinements(data.projects, suggestions, common, {});
    CHECK(none == data.projects);
  }

  TEST_CASE("decoys rarely outrank every true driver") {
    int decoy_on_top = 0;
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
      auto spec = clean_spec(100 + trial);
      spec.noise = 0.05;
      spec.defects.decoys = 2;
      const auto data = generate_synthetic_dataset(spec);
      auto config = quick_config(trial);
      config.plan.count = 200;
      config.permutations = 200;
      const auto pre = run_pre_modeling(spec.model, data.projects, config);
      const auto& top = pre.ranking.entries.front();
      if (top.kind == CandidateKind::attribute) ++decoy_on_top;
    }
    CHECK(decoy_on_top < 45);
  }

  TEST_CASE("too few usable projects is an error") {
    auto spec = clean_spec(11);
    spec.project_count = 4;
    auto data = generate_synthetic_dataset(spec);
    data.projects[0].size.reset();
    data.projects[1].ratings.clear();
    CHECK_THROWS_AS(run_iteration(spec.model, data.projects, quick_config()), std::invalid_argument);
  }
}
