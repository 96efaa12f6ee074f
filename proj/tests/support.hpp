#pragma once

#include <string>
#include <vector>

#include "cobra/model.hpp"
#include "cobra/project.hpp"

namespace cobra::test {

inline CostFactor make_factor(const std::string& id, int levels = 3) {
  CostFactor f;
  f.id = id;
  f.name = id;
  f.scale.level_count = levels;
  for (int i = 0; i <= levels; ++i) f.scale.level_anchors.push_back("level " + std::to_string(i));
  return f;
}

inline TriangularParams point(double v) { return {v, v, v}; }

/// Factor "f" with one direct influence.
inline CausalModel one_factor_model(TriangularParams t = point(0.30), int levels = 3) {
  CausalModel m;
  m.factors.push_back(make_factor("f", levels));
  m.direct.push_back({"f", t});
  return m;
}

/// Factors a, b with direct influences and the interaction a <- b.
inline CausalModel interaction_model(TriangularParams a, TriangularParams b, TriangularParams ab, int sign = 1) {
  CausalModel m;
  m.factors = {make_factor("a"), make_factor("b")};
  m.direct = {{"a", a}, {"b", b}};
  m.interactions = {{"a", "b", sign, ab}};
  return m;
}

inline ProjectRecord make_project(const std::string& id, double size, std::map<std::string, double> efforts,
                                  RatingVector ratings, const std::string& expert = "e1") {
  ProjectRecord p;
  p.id = id;
  p.size = size;
  p.phase_efforts = std::move(efforts);
  p.ratings[expert] = std::move(ratings);
  return p;
}

}  // namespace cobra::test
