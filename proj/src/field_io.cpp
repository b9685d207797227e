#include "hconv/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "json.hpp"

namespace hconv {

namespace {

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  auto p = stem;
  p += ext;
  return p;
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace

void write_field(const SampledField<double>& f, const std::filesystem::path& stem) {
  const Grid& g = f.grid;
  nlohmann::ordered_json h;
  h["format"] = "hconv-field";
  h["n"] = g.n;
  h["dtype"] = "float64";
  h["byte_order"] = "little";
  h["order"] = "row-major, last axis (t) fastest";
  h["points"] = g.points;
  h["lo"] = std::vector<double>(g.lo.data(), g.lo.data() + g.lo.size());
  h["hi"] = std::vector<double>(g.hi.data(), g.hi.data() + g.hi.size());
  std::vector<double> spacing(g.dims());
  for (int a = 0; a < g.dims(); ++a) spacing[a] = g.spacing(a);
  h["spacing"] = spacing;
  h["count"] = g.size();

  std::ofstream js(with_ext(stem, ".json"));
  if (!js) throw IoError("write_field: cannot open " + with_ext(stem, ".json").string());
  js << h.dump(2) << '\n';

  std::ofstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin) throw IoError("write_field: cannot open " + with_ext(stem, ".bin").string());
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(f.values[i]));
    bin.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!bin) throw IoError("write_field: short write");
}

SampledField<double> read_field(const std::filesystem::path& stem) {
  std::ifstream js(with_ext(stem, ".json"));
  if (!js) throw IoError("read_field: cannot open " + with_ext(stem, ".json").string());
  Grid g;
  try {
    const auto h = nlohmann::json::parse(js);
    if (h.at("dtype") != "float64" || h.at("byte_order") != "little") throw IoError("read_field: unsupported encoding");
    g.n = h.at("n").get<int>();
    g.points = h.at("points").get<std::vector<int>>();
    const auto lo = h.at("lo").get<std::vector<double>>();
    const auto hi = h.at("hi").get<std::vector<double>>();
    g.lo = Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size()));
    g.hi = Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("read_field: malformed header: ") + e.what());
  }
  g.validate();

  std::ifstream bin(with_ext(stem, ".bin"), std::ios::binary);
  if (!bin) throw IoError("read_field: cannot open " + with_ext(stem, ".bin").string());
  Eigen::VectorXd values(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    if (!bin.read(reinterpret_cast<char*>(&bits), sizeof bits)) throw IoError("read_field: payload shorter than header");
    values[i] = std::bit_cast<double>(to_little(bits));
  }
  if (bin.peek() != std::char_traits<char>::eof()) throw IoError("read_field: payload longer than header");
  return SampledField<double>(std::move(g), std::move(values));
}

}  // namespace hconv
