#include "output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "hconv/errors.hpp"

namespace hconv::cli {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) field(h);
  end_row();
  rows_ = 0;
}

void Csv::field(const std::string& raw) {
  if (pending_ == columns_) throw std::logic_error("Csv: too many fields in row");
  if (pending_ > 0) text_ += ',';
  if (raw.find_first_of(",\"\r\n") == std::string::npos) {
    text_ += raw;
  } else {
    text_ += '"';
    for (char ch : raw) {
      if (ch == '"') text_ += '"';
      text_ += ch;
    }
    text_ += '"';
  }
  ++pending_;
}

Csv& Csv::add(double v) {
  field(format_double(v));
  return *this;
}
Csv& Csv::add(long long v) {
  field(std::to_string(v));
  return *this;
}
Csv& Csv::add(bool v) {
  field(v ? "true" : "false");
  return *this;
}
Csv& Csv::add(const std::string& v) {
  field(v);
  return *this;
}

void Csv::end_row() {
  if (pending_ != columns_) throw std::logic_error("Csv: row has the wrong number of fields");
  text_ += "\r\n";
  pending_ = 0;
  ++rows_;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json check_json(const Check& c) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_double(v)); };
  return {{"name", c.name},
          {"pass", c.pass},
          {"achieved", num(c.achieved)},
          {"threshold", num(c.threshold)},
          {"detail", c.detail},
          {"informational", c.informational}};
}

}  // namespace hconv::cli
