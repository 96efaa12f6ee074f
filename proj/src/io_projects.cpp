#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "cobra/io.hpp"

namespace cobra::io {

namespace {

struct Cell {
  std::string text;
  bool quoted = false;
};

// RFC 4180 records; quoted fields may span lines.
std::vector<std::pair<std::size_t, std::vector<Cell>>> read_csv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::pair<std::size_t, std::vector<Cell>>> rows;
  std::vector<Cell> row;
  Cell cell;
  std::size_t line = 1;
  std::size_t row_line = 1;
  std::size_t i = 0;
  bool in_quotes = false;
  bool row_has_content = false;
  auto end_cell = [&] {
    row.push_back(std::move(cell));
    cell = {};
  };
  auto end_row = [&] {
    end_cell();
    if (row_has_content || row.size() > 1 || !row.front().text.empty()) rows.emplace_back(row_line, std::move(row));
    row = {};
    row_has_content = false;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.text += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.text += c;
      }
      ++i;
      continue;
    }
    if (c == '"') {
      if (!cell.text.empty()) throw ParseError("quote inside unquoted field", "line " + std::to_string(line));
      in_quotes = true;
      cell.quoted = true;
      row_has_content = true;
    } else if (c == ',') {
      end_cell();
      row_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_row();
      ++line;
      row_line = line;
    } else {
      cell.text += c;
    }
    ++i;
  }
  if (in_quotes) throw ParseError("unterminated quoted field", "line " + std::to_string(row_line));
  if (!cell.text.empty() || !row.empty() || cell.quoted) end_row();
  return rows;
}

std::string location(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> to_double(const std::string& s) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<int> to_int(const std::string& s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

enum class ColumnKind { project_id, size, effort, rating, attribute };

struct Column {
  ColumnKind kind;
  std::string name;    // phase, factor id or attribute name
  std::string expert;  // ratings only
};

Column classify(const std::string& header, std::size_t column) {
  auto bad = [&](const std::string& why) { return ParseError(why + " '" + header + "'", location(1, column)); };
  if (header == "project_id") return {ColumnKind::project_id, "", ""};
  if (header == "size") return {ColumnKind::size, "", ""};
  if (header.rfind("effort_", 0) == 0) {
    if (header.size() == 7) throw bad("effort column without phase");
    return {ColumnKind::effort, header.substr(7), ""};
  }
  if (header.rfind("factor_", 0) == 0) {
    const auto split = header.rfind("_expert_");
    if (split == std::string::npos || split < 7) throw bad("rating column must be factor_<id>_expert_<id>");
    Column c{ColumnKind::rating, header.substr(7, split - 7), header.substr(split + 8)};
    if (c.name.empty() || c.expert.empty()) throw bad("rating column must be factor_<id>_expert_<id>");
    return c;
  }
  if (header.rfind("attr_", 0) == 0) {
    if (header.size() == 5) throw bad("attribute column without name");
    return {ColumnKind::attribute, header.substr(5), ""};
  }
  throw bad("unknown column");
}

bool needs_quotes(const std::string& s) { return s.find_first_of(",\"\r\n") != std::string::npos || s != trim(s); }

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::vector<ProjectRecord> parse_projects(std::string_view text) {
  const auto rows = read_csv(text);
  if (rows.empty()) throw ParseError("missing header row", location(1, 1));

  std::vector<Column> columns;
  std::set<std::string> headers;
  bool has_id = false;
  const auto& header = rows.front().second;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = trim(header[c].text);
    if (!headers.insert(name).second) throw ParseError("duplicate column '" + name + "'", location(1, c + 1));
    columns.push_back(classify(name, c + 1));
    has_id = has_id || columns.back().kind == ColumnKind::project_id;
  }
  if (!has_id) throw ParseError("no project_id column", location(1, 1));

  std::vector<ProjectRecord> projects;
  std::set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& [line, cells] = rows[r];
    if (cells.size() != columns.size()) {
      throw ParseError("expected " + std::to_string(columns.size()) + " fields, found " + std::to_string(cells.size()),
                       location(line, 1));
    }
    ProjectRecord p;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const auto& col = columns[c];
      const std::string value = cells[c].quoted ? cells[c].text : trim(cells[c].text);
      const bool empty_text = cells[c].quoted && col.kind == ColumnKind::attribute;
      if (value.empty() && col.kind != ColumnKind::project_id && !empty_text) continue;
      auto number = [&] {
        auto v = to_double(value);
        if (!v) throw ParseError("malformed number '" + value + "'", location(line, c + 1));
        return *v;
      };
      switch (col.kind) {
        case ColumnKind::project_id:
          if (value.empty()) throw ParseError("empty project_id", location(line, c + 1));
          p.id = value;
          break;
        case ColumnKind::size: p.size = number(); break;
        case ColumnKind::effort: p.phase_efforts[col.name] = number(); break;
        case ColumnKind::rating: {
          auto v = to_int(value);
          if (!v) throw ParseError("rating must be an integer, got '" + value + "'", location(line, c + 1));
          p.ratings[col.expert][col.name] = *v;
          break;
        }
        case ColumnKind::attribute: {
          // quoted cells are always categorical
          auto v = cells[c].quoted ? std::nullopt : to_double(value);
          if (v) {
            p.attributes[col.name] = *v;
          } else {
            p.attributes[col.name] = value;
          }
          break;
        }
      }
    }
    if (!ids.insert(p.id).second) throw ParseError("duplicate project_id '" + p.id + "'", location(line, 1));
    projects.push_back(std::move(p));
  }
  return projects;
}

std::string serialize_projects(std::span<const ProjectRecord> projects) {
  std::set<std::string> phases;
  std::set<std::pair<std::string, std::string>> ratings;  // (factor, expert)
  std::set<std::string> attributes;
  for (const auto& p : projects) {
    for (const auto& [phase, _] : p.phase_efforts) phases.insert(phase);
    for (const auto& [expert, vector] : p.ratings) {
      for (const auto& [factor, _] : vector) ratings.emplace(factor, expert);
    }
    for (const auto& [name, _] : p.attributes) attributes.insert(name);
  }

  std::string out = "project_id,size";
  for (const auto& phase : phases) out += ",effort_" + phase;
  for (const auto& [factor, expert] : ratings) out += ",factor_" + factor + "_expert_" + expert;
  for (const auto& name : attributes) out += ",attr_" + name;
  out += '\n';

  for (const auto& p : projects) {
    out += needs_quotes(p.id) ? quote(p.id) : p.id;
    out += ',';
    if (p.size) out += format_number(*p.size);
    for (const auto& phase : phases) {
      out += ',';
      if (auto it = p.phase_efforts.find(phase); it != p.phase_efforts.end()) out += format_number(it->second);
    }
    for (const auto& [factor, expert] : ratings) {
      out += ',';
      auto e = p.ratings.find(expert);
      if (e == p.ratings.end()) continue;
      if (auto it = e->second.find(factor); it != e->second.end()) out += std::to_string(it->second);
    }
    for (const auto& name : attributes) {
      out += ',';
      auto it = p.attributes.find(name);
      if (it == p.attributes.end()) continue;
      if (const auto* v = std::get_if<double>(&it->second)) {
        out += format_number(*v);
      } else {
        const auto& s = std::get<std::string>(it->second);
        out += (needs_quotes(s) || s.empty() || to_double(s)) ? quote(s) : s;
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<ProjectRecord> load_projects(const std::filesystem::path& path) { return parse_projects(read_file(path)); }

void save_projects(std::span<const ProjectRecord> projects, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_projects(projects));
}

}  // namespace cobra::io
