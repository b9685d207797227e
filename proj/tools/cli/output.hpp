#pragma once

// Result persistence: RFC-4180 CSV, atomic file replacement and the run manifest.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace hconv::cli {

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// CSV with CRLF line ends; fields quoted only when they contain , " or a line break.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);

  Csv& add(double v);  // %.17g, nan / inf / -inf spelled out
  Csv& add(long long v);
  Csv& add(int v) { return add(static_cast<long long>(v)); }
  Csv& add(bool v);
  Csv& add(const std::string& v);
  Csv& add(const char* v) { return add(std::string(v)); }
  void end_row();

  std::size_t rows() const { return rows_; }
  const std::string& str() const { return text_; }

 private:
  void field(const std::string& raw);

  std::size_t columns_;
  std::size_t pending_ = 0;
  std::size_t rows_ = 0;
  std::string text_;
};

std::string format_double(double v);

struct Check {
  std::string name;
  bool pass = false;
  double achieved = 0.0;
  double threshold = 0.0;
  std::string detail;
  bool informational = false;  // reported, never affects the exit code
};

struct CommandResult {
  std::vector<Check> checks;
  std::vector<std::string> outputs;  // relative to the output directory
};

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_now();

nlohmann::json check_json(const Check& c);

}  // namespace hconv::cli
