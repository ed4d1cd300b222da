#include "loggas/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "loggas/errors.hpp"

namespace loggas {

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* v = std::getenv("LOGGAS_LOG");
    if (!v) return LogLevel::Warn;
    const std::string s(v);
    if (s == "quiet") return LogLevel::Quiet;
    if (s == "error") return LogLevel::Error;
    if (s == "info") return LogLevel::Info;
    if (s == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

void log(LogLevel level, const std::string& msg) {
  static const char* tags[] = {"", "error", "warn", "info", "debug"};
  if (level == LogLevel::Quiet || static_cast<int>(level) > static_cast<int>(log_level())) return;
  std::cerr << "loggas " << tags[static_cast<int>(level)] << ": " << msg << '\n';
}

namespace {
std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}
}  // namespace

void csv_to_json(const std::string& csv_path, const std::string& json_path) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot read " + csv_path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(csv_path + " is empty");
  const auto header = split(line);
  nlohmann::json rows = nlohmann::json::array();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    nlohmann::json row = nlohmann::json::object();
    for (size_t k = 0; k < header.size() && k < cells.size(); ++k) {
      const std::string& c = cells[k];
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (!c.empty() && end == c.c_str() + c.size() && std::isfinite(v)) row[header[k]] = v;
      else if (c == "nan") row[header[k]] = nullptr;
      else row[header[k]] = c;
    }
    rows.push_back(row);
  }
  std::ofstream out(json_path);
  if (!out) throw ConfigError("cannot write " + json_path);
  out << rows.dump(1) << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace loggas
