#include "cobra/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace cobra {

namespace {

std::string project_name(std::size_t index, std::size_t count) {
  const int width = count >= 100 ? 3 : 2;
  std::string digits = std::to_string(index + 1);
  if (digits.size() < static_cast<std::size_t>(width)) digits.insert(0, width - digits.size(), '0');
  return "P" + digits;
}

double round_to(double value, double step) { return std::round(value / step) * step; }

OrdinalScale default_scale() { return {3, {"nominal", "moderate", "significant", "extreme"}}; }

// Distinct indices drawn from `pool`, seeded.
std::vector<std::size_t> pick(UniformStream& stream, std::vector<std::size_t> pool, std::size_t count) {
  std::vector<std::size_t> out;
  while (out.size() < count && !pool.empty()) {
    const auto i = stream.below(pool.size());
    out.push_back(pool[i]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return out;
}

}  // namespace

CausalModel default_synthetic_model() {
  CausalModel m;
  const std::vector<std::tuple<std::string, std::string, TriangularParams>> drivers = {
      {"req_volatility", "Requirements volatility", {0.20, 0.30, 0.45}},
      {"team_capability", "Insufficient team capability", {0.25, 0.35, 0.50}},
      {"platform_novelty", "Platform novelty", {0.15, 0.25, 0.40}},
      {"customer_participation", "Weak customer participation", {0.20, 0.30, 0.40}},
      {"reliability_demands", "Reliability requirements", {0.25, 0.40, 0.50}},
  };
  for (const auto& [id, name, triangle] : drivers) {
    m.factors.push_back({id, name, Direction::positive, default_scale(), ""});
    m.direct.push_back({id, triangle});
  }
  return m;
}

SyntheticDataset generate_synthetic_dataset(const SyntheticSpec& spec) {
  require_valid(spec.model);
  if (spec.project_count < 4) throw std::invalid_argument("synthetic dataset needs at least 4 projects");
  if (!(spec.noise >= 0.0)) throw std::invalid_argument("noise level must be nonnegative");
  if (!(spec.nominal_productivity > 0.0)) throw std::invalid_argument("nominal productivity must be positive");
  if (!(spec.size_min > 0.0 && spec.size_min <= spec.size_max)) throw std::invalid_argument("invalid size range");
  if (spec.phase_shares.empty()) throw std::invalid_argument("at least one effort phase required");
  const auto& d = spec.defects;
  if (d.scope_defects > 0) {
    bool known = false;
    for (const auto& [phase, _] : spec.phase_shares) known = known || phase == d.dropped_phase;
    if (!known) throw std::invalid_argument("dropped phase " + d.dropped_phase + " is not generated");
  }

  MultiplierDraw at_means;
  for (const auto& influence : canonical_influences(spec.model)) {
    const auto& t = influence.params;
    // rounding can push the mean of a degenerate triangle just outside it
    at_means[influence.key] = std::clamp((t.min + t.likely + t.max) / 3.0, t.min, t.max);
  }

  UniformStream base(spec.seed.derive("synthetic:base"));
  UniformStream noise(spec.seed.derive("synthetic:noise"));
  UniformStream hidden(spec.seed.derive("synthetic:hidden"));

  SyntheticDataset out;
  out.truth.nominal_productivity = spec.nominal_productivity;
  const std::size_t n = spec.project_count;
  for (std::size_t k = 0; k < n; ++k) {
    ProjectRecord p;
    p.id = project_name(k, n);
    p.size = round_to(spec.size_min + base.next() * (spec.size_max - spec.size_min), 0.001);
    RatingVector ratings;
    for (const auto& factor : spec.model.factors) {
      ratings[factor.id] = static_cast<int>(base.below(static_cast<std::uint64_t>(factor.scale.level_count) + 1));
    }
    const double co = evaluate_overhead(spec.model, ratings, at_means);
    const double epsilon = spec.noise * (2.0 * noise.next() - 1.0);
    double effort = *p.size / spec.nominal_productivity * (1.0 + co) * (1.0 + epsilon);
    if (!d.hidden_driver.empty()) {
      const double h = round_to(hidden.next(), 0.001);
      p.attributes[d.hidden_driver] = h;
      effort *= 1.0 + d.hidden_strength * h;
    }
    p.ratings["e1"] = ratings;
    for (const auto& [phase, share] : spec.phase_shares) p.phase_efforts[phase] = effort * share;
    out.truth.overhead[p.id] = co;
    out.truth.effort[p.id] = effort;
    out.projects.push_back(std::move(p));
  }

  if (d.decoys > 0) {
    UniformStream decoys(spec.seed.derive("synthetic:decoys"));
    for (std::size_t j = 1; j <= d.decoys; ++j) out.truth.decoys.push_back("decoy_" + std::to_string(j));
    for (auto& p : out.projects) {
      for (const auto& name : out.truth.decoys) p.attributes[name] = round_to(decoys.next(), 0.001);
    }
  }

  if (d.disagreeing_expert) {
    UniformStream experts(spec.seed.derive("synthetic:experts"));
    for (auto& p : out.projects) {
      const auto truth = p.ratings.at("e1");
      auto contrary = truth;
      for (const auto& factor : spec.model.factors) {
        const int r = truth.at(factor.id);
        const int flipped = factor.scale.level_count - r;
        if (std::abs(flipped - r) >= 2 && experts.next() < 0.25) {
          contrary[factor.id] = flipped;
          out.truth.disagreement_cells.emplace_back(p.id, factor.id);
        }
      }
      p.ratings["e2"] = truth;
      p.ratings["e3"] = contrary;
    }
  }

  UniformStream defects(spec.seed.derive("synthetic:defects"));
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  if (d.outlier) {
    const auto index = pick(defects, pool, 1).front();
    pool.erase(std::find(pool.begin(), pool.end(), index));
    auto& p = out.projects[index];
    for (auto& [phase, effort] : p.phase_efforts) effort *= d.outlier_factor;
    out.truth.outlier = p.id;
  }
  if (d.scope_defects > 0) {
    auto chosen = pick(defects, pool, d.scope_defects);
    std::sort(chosen.begin(), chosen.end());
    for (auto index : chosen) {
      out.projects[index].phase_efforts.erase(d.dropped_phase);
      out.truth.scope_defects.push_back(out.projects[index].id);
    }
  }
  return out;
}

}  // namespace cobra
