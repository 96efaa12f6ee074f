#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cobra {

/// Ordinal rating scale of a cost factor. Level 0 is the nominal (best)
/// situation, level `level_count` the extreme (worst) one.
struct OrdinalScale {
  int level_count = 3;
  std::vector<std::string> level_anchors;  // level_count + 1 entries

  bool operator==(const OrdinalScale&) const = default;
};

/// Three-point expert estimate of the cost overhead at a factor's extreme
/// level, as a fraction of nominal cost (0.30 = 30%).
struct TriangularParams {
  double min = 0.0;
  double likely = 0.0;
  double max = 0.0;

  bool operator==(const TriangularParams&) const = default;
};

enum class Direction { positive, negative };

struct CostFactor {
  std::string id;
  std::string name;
  Direction direction = Direction::positive;  // display only; ratings are stored with 0 = nominal
  OrdinalScale scale;
  std::string description;

  bool operator==(const CostFactor&) const = default;
};

struct DirectInfluence {
  std::string factor_id;
  TriangularParams extreme_overhead;

  bool operator==(const DirectInfluence&) const = default;
};

/// Bivariate term: the indirect factor modulates the direct factor's effect.
struct InteractionInfluence {
  std::string direct_factor_id;
  std::string indirect_factor_id;
  int sign = 1;
  TriangularParams extreme_overhead;

  bool operator==(const InteractionInfluence&) const = default;
};

struct CausalModel {
  std::vector<CostFactor> factors;
  std::vector<DirectInfluence> direct;
  std::vector<InteractionInfluence> interactions;

  const CostFactor* find_factor(std::string_view id) const;
  bool has_direct_influence(std::string_view factor_id) const;

  bool operator==(const CausalModel&) const = default;
};

/// factor id -> rating in [0, level_count], 0 = nominal.
using RatingVector = std::map<std::string, int>;

/// Identity of one influence. `indirect_factor_id` is empty for direct influences.
struct InfluenceKey {
  std::string direct_factor_id;
  std::string indirect_factor_id;

  bool is_interaction() const { return !indirect_factor_id.empty(); }
  std::string label() const;

  auto operator<=>(const InfluenceKey&) const = default;
};

/// One sampled overhead fraction per influence.
using MultiplierDraw = std::map<InfluenceKey, double>;

struct Influence {
  InfluenceKey key;
  TriangularParams params;
  int sign = 1;
};

struct Violation {
  std::string rule;
  std::string subject;
  std::string message;
};

std::vector<Violation> validate_model(const CausalModel& model);

/// Throws std::invalid_argument listing every violation when the model is invalid.
void require_valid(const CausalModel& model);

/// Linear position of `rating` between nominal (0) and extreme (1).
double interpolation_weight(int rating, const OrdinalScale& scale);

/// Influences in sampling order: direct influences by factor id, then
/// interactions by (direct, indirect) id. Variable k of a simulation is the
/// k-th entry of this list.
std::vector<Influence> canonical_influences(const CausalModel& model);

/// Per-influence factor c_k such that CO = sum_k c_k * draw_k, aligned with
/// canonical_influences(). Throws on missing or out-of-scale ratings.
std::vector<double> overhead_coefficients(const CausalModel& model, const RatingVector& ratings);

double evaluate_overhead(const CausalModel& model, const RatingVector& ratings, const MultiplierDraw& draw);

struct OverheadBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Range of CO over all admissible draws for fixed ratings (sign-aware).
OverheadBounds overhead_bounds(const CausalModel& model, const RatingVector& ratings);

/// Reverse-codes ratings of '-' factors (r -> L - r). Applying it twice is the identity.
RatingVector recode_ratings(const CausalModel& model, const RatingVector& ratings);

std::string_view to_string(Direction direction);

}  // namespace cobra
