#include "cobra/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cobra {

const CostFactor* CausalModel::find_factor(std::string_view id) const {
  for (const auto& factor : factors) {
    if (factor.id == id) return &factor;
  }
  return nullptr;
}

bool CausalModel::has_direct_influence(std::string_view factor_id) const {
  return std::any_of(direct.begin(), direct.end(), [&](const DirectInfluence& d) { return d.factor_id == factor_id; });
}

std::string InfluenceKey::label() const {
  if (!is_interaction()) return direct_factor_id;
  return direct_factor_id + "<-" + indirect_factor_id;
}

std::string_view to_string(Direction direction) { return direction == Direction::positive ? "+" : "-"; }

namespace {

bool valid_triangle(const TriangularParams& t) {
  return std::isfinite(t.min) && std::isfinite(t.likely) && std::isfinite(t.max) && t.min <= t.likely &&
         t.likely <= t.max && t.min >= -1.0;
}

std::string describe(const TriangularParams& t) {
  std::ostringstream os;
  os << "(" << t.min << ", " << t.likely << ", " << t.max << ")";
  return os.str();
}

// Longest chain (in interaction edges) ending at each node of the
// indirect -> direct graph. Returns false when the graph has a cycle.
bool interaction_chain_lengths(const CausalModel& model, std::map<std::string, int>& depth) {
  std::map<std::string, std::vector<std::string>> incoming;
  for (const auto& ia : model.interactions) {
    if (ia.direct_factor_id == ia.indirect_factor_id) continue;
    incoming[ia.direct_factor_id].push_back(ia.indirect_factor_id);
  }
  enum class Mark { none, active, done };
  std::map<std::string, Mark> marks;
  bool acyclic = true;
  std::function<int(const std::string&)> visit = [&](const std::string& node) -> int {
    auto& mark = marks[node];
    if (mark == Mark::done) return depth[node];
    if (mark == Mark::active) {
      acyclic = false;
      return 0;
    }
    mark = Mark::active;
    int longest = 0;
    if (auto it = incoming.find(node); it != incoming.end()) {
      for (const auto& source : it->second) longest = std::max(longest, visit(source) + 1);
    }
    marks[node] = Mark::done;
    depth[node] = longest;
    return longest;
  };
  for (const auto& [node, _] : incoming) visit(node);
  return acyclic;
}

}  // namespace

std::vector<Violation> validate_model(const CausalModel& model) {
  std::vector<Violation> out;
  auto report = [&](std::string rule, std::string subject, std::string message) {
    out.push_back({std::move(rule), std::move(subject), std::move(message)});
  };

  std::set<std::string> seen;
  for (const auto& factor : model.factors) {
    if (factor.id.empty()) report("empty_factor_id", factor.name, "cost factor without id");
    if (!seen.insert(factor.id).second) {
      report("duplicate_factor", factor.id, "factor id declared more than once");
    }
    if (factor.scale.level_count < 1) {
      report("scale_levels", factor.id, "rating scale needs at least one level above nominal");
    } else if (factor.scale.level_anchors.size() != static_cast<std::size_t>(factor.scale.level_count) + 1) {
      report("scale_anchors", factor.id,
             "expected " + std::to_string(factor.scale.level_count + 1) + " level anchors, got " +
                 std::to_string(factor.scale.level_anchors.size()));
    }
  }

  if (model.direct.empty()) report("no_direct_influence", "", "model has no direct influence");

  std::set<std::string> direct_seen;
  for (const auto& d : model.direct) {
    if (model.find_factor(d.factor_id) == nullptr) {
      report("unknown_factor", d.factor_id, "direct influence references undeclared factor");
    }
    if (!direct_seen.insert(d.factor_id).second) {
      report("duplicate_direct", d.factor_id, "factor has more than one direct influence");
    }
    if (!valid_triangle(d.extreme_overhead)) {
      report("triangular", d.factor_id, "need -1 <= min <= likely <= max, got " + describe(d.extreme_overhead));
    }
  }

  std::set<std::string> interaction_targets;
  for (const auto& ia : model.interactions) interaction_targets.insert(ia.direct_factor_id);

  std::set<std::pair<std::string, std::string>> pairs_seen;
  for (const auto& ia : model.interactions) {
    const InfluenceKey key{ia.direct_factor_id, ia.indirect_factor_id};
    const std::string label = key.label();
    if (!model.has_direct_influence(ia.direct_factor_id)) {
      report("interaction_without_direct", ia.direct_factor_id,
             "interaction " + label + " targets a factor without direct influence");
    }
    if (model.find_factor(ia.indirect_factor_id) == nullptr) {
      report("unknown_factor", ia.indirect_factor_id,
             "interaction " + label + " references undeclared indirect factor");
    }
    if (ia.direct_factor_id == ia.indirect_factor_id) {
      report("self_interaction", label, "factor interacts with itself");
    }
    if (ia.sign != 1 && ia.sign != -1) {
      report("interaction_sign", label, "sign must be +1 or -1");
    }
    if (!pairs_seen.emplace(ia.direct_factor_id, ia.indirect_factor_id).second) {
      report("duplicate_interaction", label, "interaction declared more than once");
    }
    if (!valid_triangle(ia.extreme_overhead)) {
      report("triangular", label, "need -1 <= min <= likely <= max, got " + describe(ia.extreme_overhead));
    }
    if (ia.direct_factor_id != ia.indirect_factor_id && interaction_targets.count(ia.indirect_factor_id) != 0) {
      report("depth", label,
             "indirect factor " + ia.indirect_factor_id +
                 " is itself modulated by another interaction; only one level of indirection is allowed");
    }
  }

  std::map<std::string, int> depth;
  if (!interaction_chain_lengths(model, depth)) {
    report("cycle", "", "interaction graph contains a cycle");
  }
  return out;
}

void require_valid(const CausalModel& model) {
  const auto violations = validate_model(model);
  if (violations.empty()) return;
  std::string message = "invalid causal model:";
  for (const auto& v : violations) {
    message += "\n  [" + v.rule + "] " + (v.subject.empty() ? "" : v.subject + ": ") + v.message;
  }
  throw std::invalid_argument(message);
}

double interpolation_weight(int rating, const OrdinalScale& scale) {
  if (scale.level_count < 1) throw std::invalid_argument("rating scale with no levels");
  if (rating < 0 || rating > scale.level_count) {
    throw std::out_of_range("rating " + std::to_string(rating) + " outside [0, " + std::to_string(scale.level_count) +
                            "]");
  }
  return static_cast<double>(rating) / static_cast<double>(scale.level_count);
}

std::vector<Influence> canonical_influences(const CausalModel& model) {
  std::vector<Influence> directs;
  directs.reserve(model.direct.size());
  for (const auto& d : model.direct) directs.push_back({{d.factor_id, ""}, d.extreme_overhead, 1});
  std::sort(directs.begin(), directs.end(), [](const Influence& a, const Influence& b) { return a.key < b.key; });

  std::vector<Influence> pairs;
  pairs.reserve(model.interactions.size());
  for (const auto& ia : model.interactions) {
    pairs.push_back({{ia.direct_factor_id, ia.indirect_factor_id}, ia.extreme_overhead, ia.sign});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Influence& a, const Influence& b) { return a.key < b.key; });

  directs.insert(directs.end(), pairs.begin(), pairs.end());
  return directs;
}

namespace {

double weight_of(const CausalModel& model, const RatingVector& ratings, const std::string& id) {
  const auto* factor = model.find_factor(id);
  if (factor == nullptr) throw std::invalid_argument("unknown factor " + id);
  auto it = ratings.find(id);
  if (it == ratings.end()) throw std::invalid_argument("missing rating for factor " + id);
  try {
    return interpolation_weight(it->second, factor->scale);
  } catch (const std::out_of_range& e) {
    throw std::out_of_range("factor " + id + ": " + e.what());
  }
}

}  // namespace

std::vector<double> overhead_coefficients(const CausalModel& model, const RatingVector& ratings) {
  std::vector<double> coefficients;
  for (const auto& influence : canonical_influences(model)) {
    const double w = weight_of(model, ratings, influence.key.direct_factor_id);
    if (!influence.key.is_interaction()) {
      coefficients.push_back(w);
    } else {
      const double wj = weight_of(model, ratings, influence.key.indirect_factor_id);
      coefficients.push_back(static_cast<double>(influence.sign) * w * wj);
    }
  }
  return coefficients;
}

double evaluate_overhead(const CausalModel& model, const RatingVector& ratings, const MultiplierDraw& draw) {
  const auto influences = canonical_influences(model);
  const auto coefficients = overhead_coefficients(model, ratings);
  double overhead = 0.0;
  for (std::size_t k = 0; k < influences.size(); ++k) {
    const auto& influence = influences[k];
    auto it = draw.find(influence.key);
    if (it == draw.end()) {
      throw std::invalid_argument("draw has no value for influence " + influence.key.label());
    }
    if (it->second < influence.params.min || it->second > influence.params.max) {
      throw std::out_of_range("draw for " + influence.key.label() + " outside its triangular range");
    }
    overhead += coefficients[k] * it->second;
  }
  return overhead;
}

OverheadBounds overhead_bounds(const CausalModel& model, const RatingVector& ratings) {
  const auto influences = canonical_influences(model);
  const auto coefficients = overhead_coefficients(model, ratings);
  OverheadBounds bounds;
  for (std::size_t k = 0; k < influences.size(); ++k) {
    const double at_min = coefficients[k] * influences[k].params.min;
    const double at_max = coefficients[k] * influences[k].params.max;
    bounds.lower += std::min(at_min, at_max);
    bounds.upper += std::max(at_min, at_max);
  }
  return bounds;
}

RatingVector recode_ratings(const CausalModel& model, const RatingVector& ratings) {
  RatingVector out = ratings;
  for (auto& [id, rating] : out) {
    const auto* factor = model.find_factor(id);
    if (factor != nullptr && factor->direction == Direction::negative) {
      rating = factor->scale.level_count - rating;
    }
  }
  return out;
}

}  // namespace cobra
