#include <charconv>
#include <fstream>
#include <sstream>

#include "cobra/io.hpp"

namespace cobra::io {

ParseError::ParseError(const std::string& message, std::string location)
    : std::runtime_error(location.empty() ? message : location + ": " + message), location_(std::move(location)) {}

namespace {

std::string violation_message(const std::vector<Violation>& violations) {
  std::string message = "invalid causal model";
  for (const auto& v : violations) {
    message += "\n  [" + v.rule + "] " + (v.subject.empty() ? "" : v.subject + ": ") + v.message;
  }
  return message;
}

}  // namespace

ModelValidationError::ModelValidationError(std::vector<Violation> violations)
    : std::runtime_error(violation_message(violations)), violations_(std::move(violations)) {}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + temp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + temp.string());
  }
  std::filesystem::rename(temp, path);
}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string format_significant(double value, int significant) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, significant);
  return std::string(buf, end);
}

std::string format_cdf(const CostDistribution& dist) {
  if (dist.samples.empty()) throw std::invalid_argument("empty cost distribution");
  std::string out;
  const double n = static_cast<double>(dist.samples.size());
  for (std::size_t i = 0; i < dist.samples.size(); ++i) {
    out += format_significant(dist.samples[i], 9);
    out += ',';
    out += format_significant(static_cast<double>(i + 1) / n, 9);
    out += '\n';
  }
  return out;
}

void emit_cdf(const CostDistribution& dist, const std::filesystem::path& path) {
  write_file_atomic(path, format_cdf(dist));
}

}  // namespace cobra::io
