#include <set>

#include "cobra/io.hpp"

namespace cobra::io {

using nlohmann::json;

namespace {

std::string text_position(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // byte is one past the offending character
    throw ParseError(e.what(), text_position(text, e.byte == 0 ? 0 : e.byte - 1));
  }
}

// Reads one JSON object, rejecting fields outside `allowed`.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string pointer, std::set<std::string> allowed)
      : node_(node), pointer_(std::move(pointer)) {
    if (!node_.is_object()) throw ParseError("expected an object", pointer_.empty() ? "/" : pointer_);
    for (const auto& [key, _] : node_.items()) {
      if (allowed.count(key) == 0) throw ParseError("unknown field '" + key + "'", pointer_ + "/" + key);
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& at(const std::string& key) const {
    if (!node_.contains(key)) throw ParseError("missing field '" + key + "'", pointer_.empty() ? "/" : pointer_);
    return node_.at(key);
  }

  std::string pointer(const std::string& key) const { return pointer_ + "/" + key; }

  std::string string(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ParseError("expected a string", pointer(key));
    return v.get<std::string>();
  }

  std::string string_or(const std::string& key, std::string fallback) const {
    return has(key) ? string(key) : fallback;
  }

  double number(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) throw ParseError("expected a number", pointer(key));
    return v.get<double>();
  }

  int integer(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ParseError("expected an integer", pointer(key));
    return v.get<int>();
  }

  const json& array(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_array()) throw ParseError("expected an array", pointer(key));
    return v;
  }

 private:
  const json& node_;
  std::string pointer_;
};

TriangularParams read_triangle(const ObjectReader& r) { return {r.number("min"), r.number("likely"), r.number("max")}; }

json triangle_fields(json node, const TriangularParams& t) {
  node["min"] = t.min;
  node["likely"] = t.likely;
  node["max"] = t.max;
  return node;
}

}  // namespace

CausalModel parse_model(std::string_view text) {
  const json doc = parse_json(text);
  const ObjectReader root(doc, "", {"factors", "direct", "interactions"});
  CausalModel model;

  const auto& factors = root.array("factors");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const ObjectReader r(factors[i], "/factors/" + std::to_string(i),
                         {"id", "name", "direction", "level_count", "level_anchors", "description"});
    CostFactor f;
    f.id = r.string("id");
    f.name = r.string_or("name", f.id);
    const auto direction = r.string_or("direction", "+");
    if (direction != "+" && direction != "-")
      throw ParseError("direction must be \"+\" or \"-\"", r.pointer("direction"));
    f.direction = direction == "+" ? Direction::positive : Direction::negative;
    f.scale.level_count = r.integer("level_count");
    const auto& anchors = r.array("level_anchors");
    for (std::size_t j = 0; j < anchors.size(); ++j) {
      if (!anchors[j].is_string())
        throw ParseError("expected a string", r.pointer("level_anchors") + "/" + std::to_string(j));
      f.scale.level_anchors.push_back(anchors[j].get<std::string>());
    }
    f.description = r.string_or("description", "");
    model.factors.push_back(std::move(f));
  }

  const auto& direct = root.array("direct");
  for (std::size_t i = 0; i < direct.size(); ++i) {
    const ObjectReader r(direct[i], "/direct/" + std::to_string(i), {"factor_id", "min", "likely", "max"});
    model.direct.push_back({r.string("factor_id"), read_triangle(r)});
  }

  if (root.has("interactions")) {
    const auto& interactions = root.array("interactions");
    for (std::size_t i = 0; i < interactions.size(); ++i) {
      const ObjectReader r(interactions[i], "/interactions/" + std::to_string(i),
                           {"direct_factor_id", "indirect_factor_id", "sign", "min", "likely", "max"});
      model.interactions.push_back(
          {r.string("direct_factor_id"), r.string("indirect_factor_id"), r.integer("sign"), read_triangle(r)});
    }
  }

  if (auto violations = validate_model(model); !violations.empty()) {
    throw ModelValidationError(std::move(violations));
  }
  return model;
}

std::string serialize_model(const CausalModel& model) {
  json doc;
  doc["factors"] = json::array();
  for (const auto& f : model.factors) {
    doc["factors"].push_back({{"id", f.id},
                              {"name", f.name},
                              {"direction", std::string(to_string(f.direction))},
                              {"level_count", f.scale.level_count},
                              {"level_anchors", f.scale.level_anchors},
                              {"description", f.description}});
  }
  doc["direct"] = json::array();
  for (const auto& d : model.direct) {
    doc["direct"].push_back(triangle_fields({{"factor_id", d.factor_id}}, d.extreme_overhead));
  }
  doc["interactions"] = json::array();
  for (const auto& ia : model.interactions) {
    doc["interactions"].push_back(triangle_fields(
        {{"direct_factor_id", ia.direct_factor_id}, {"indirect_factor_id", ia.indirect_factor_id}, {"sign", ia.sign}},
        ia.extreme_overhead));
  }
  return doc.dump(2) + "\n";
}

CausalModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

void save_model(const CausalModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

RatingVector parse_ratings(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ParseError("expected an object of factor ratings", "/");
  RatingVector ratings;
  for (const auto& [key, value] : doc.items()) {
    if (!value.is_number_integer()) throw ParseError("rating must be an integer", "/" + key);
    ratings[key] = value.get<int>();
  }
  return ratings;
}

}  // namespace cobra::io
