#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hconv/errors.hpp"

namespace hconv::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

// Strict readers: integers must be integral JSON numbers, no silent truncation.
void read(const std::string& key, const json& v, int& out) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  const auto x = v.get<long long>();
  if (x < -1000000000LL || x > 1000000000LL) bad(key, "integer out of range");
  out = static_cast<int>(x);
}
void read(const std::string& key, const json& v, std::uint64_t& out) {
  if (!v.is_number_unsigned()) bad(key, "expected a non-negative integer");
  out = v.get<std::uint64_t>();
}
void read(const std::string& key, const json& v, double& out) {
  if (!v.is_number()) bad(key, "expected a number");
  out = v.get<double>();
  if (!std::isfinite(out)) bad(key, "expected a finite number");
}
void read(const std::string& key, const json& v, bool& out) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  out = v.get<bool>();
}
void read(const std::string& key, const json& v, std::string& out) {
  if (!v.is_string()) bad(key, "expected a string");
  out = v.get<std::string>();
}
template <typename T, std::size_t K>
void read(const std::string& key, const json& v, std::array<T, K>& out) {
  if (!v.is_array() || v.size() != K) bad(key, "expected an array of length " + std::to_string(K));
  for (std::size_t i = 0; i < K; ++i) read(key, v[i], out[i]);
}
template <typename T>
void read(const std::string& key, const json& v, std::vector<T>& out) {
  if (!v.is_array()) bad(key, "expected an array");
  std::vector<T> tmp(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) read(key, v[i], tmp[i]);
  out = std::move(tmp);
}

template <typename T>
const char* type_name() {
  if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) return "integer";
  else if constexpr (std::is_same_v<T, double>) return "number";
  else if constexpr (std::is_same_v<T, bool>) return "boolean";
  else if constexpr (std::is_same_v<T, std::string>) return "string";
  else if constexpr (std::is_same_v<T, std::vector<int>>) return "integer array";
  else if constexpr (std::is_same_v<T, std::vector<double>>) return "number array";
  else return "array of [1/p, 1/q] pairs";
}

struct Field {
  std::function<void(RunConfig&, const std::string&, const json&)> set;
  std::function<json(const RunConfig&)> get;
  std::string type;
  bool hashed = true;
};

template <typename T>
Field field(T RunConfig::*member, bool hashed = true) {
  return {[member](RunConfig& c, const std::string& key, const json& v) { read(key, v, c.*member); },
          [member](const RunConfig& c) { return json(c.*member); }, type_name<T>(), hashed};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"n", field(&RunConfig::n)},
      {"phase.kind", field(&RunConfig::phase)},
      {"phase.a", field(&RunConfig::a)},
      {"phase.m", field(&RunConfig::m)},
      {"cutoff.resolution", field(&RunConfig::cutoff_resolution)},
      {"grid.points_x", field(&RunConfig::grid_points_x)},
      {"grid.points_t", field(&RunConfig::grid_points_t)},
      {"quadrature.nodes", field(&RunConfig::quad_nodes)},
      {"quadrature.panels", field(&RunConfig::quad_panels)},
      {"quadrature.interp_order", field(&RunConfig::quad_interp_order)},
      {"quadrature.rule", field(&RunConfig::quad_rule)},
      {"ladder.first", field(&RunConfig::ladder_first)},
      {"ladder.count", field(&RunConfig::ladder_count)},
      {"ladder.cells_per_delta", field(&RunConfig::ladder_cells_per_delta)},
      {"experiment.local_nodes", field(&RunConfig::local_nodes)},
      {"experiment.x_samples", field(&RunConfig::x_samples)},
      {"experiment.t_samples", field(&RunConfig::t_samples)},
      {"scaling.points", field(&RunConfig::scaling_points)},
      {"scaling.tol", field(&RunConfig::scaling_tol)},
      {"scaling.dump_fields", field(&RunConfig::dump_fields)},
      {"scan.k", field(&RunConfig::scan_k)},
      {"scan.norm_bounds", field(&RunConfig::norm_bounds)},
      {"norm.points_x", field(&RunConfig::norm_points_x)},
      {"norm.points_t", field(&RunConfig::norm_points_t)},
      {"norm.iterations", field(&RunConfig::norm_iterations)},
      {"transform.nmax", field(&RunConfig::transform_nmax)},
      {"transform.kmax", field(&RunConfig::transform_kmax)},
      {"transform.xi_count", field(&RunConfig::transform_xi_count)},
      {"transform.xi_extent", field(&RunConfig::transform_xi_extent)},
      {"transform.quad_tol", field(&RunConfig::transform_quad_tol)},
      {"transform.tol", field(&RunConfig::transform_tol)},
      {"modulus.kmax", field(&RunConfig::modulus_kmax)},
      {"modulus.tol", field(&RunConfig::modulus_tol)},
      {"spectral.z_imag", field(&RunConfig::spectral_z_imag)},
      {"spectral.N", field(&RunConfig::spectral_N)},
      {"spectral.alpha_max", field(&RunConfig::spectral_alpha_max)},
      {"spectral.lambda_lo", field(&RunConfig::spectral_lambda_lo)},
      {"spectral.lambda_hi", field(&RunConfig::spectral_lambda_hi)},
      {"spectral.lambda_per_sign", field(&RunConfig::spectral_lambda_per_sign)},
      {"upsilon.k_max", field(&RunConfig::upsilon_k_max)},
      {"upsilon.lambda_per_sign", field(&RunConfig::upsilon_lambda_per_sign)},
      {"vdc.m", field(&RunConfig::vdc_m)},
      {"vdc.count", field(&RunConfig::vdc_count)},
      {"vdc.tol", field(&RunConfig::vdc_tol)},
      {"decay.re", field(&RunConfig::decay_re)},
      {"decay.im", field(&RunConfig::decay_im)},
      {"decay.N", field(&RunConfig::decay_N)},
      {"decay.s_max", field(&RunConfig::decay_s_max)},
      {"agreement.re", field(&RunConfig::agreement_re)},
      {"agreement.im", field(&RunConfig::agreement_im)},
      {"agreement.extent", field(&RunConfig::agreement_extent)},
      {"agreement.step", field(&RunConfig::agreement_step)},
      {"agreement.tol", field(&RunConfig::agreement_tol)},
      {"plancherel.tol", field(&RunConfig::plancherel_tol)},
      {"group.triples", field(&RunConfig::group_triples)},
      {"group.seed", field(&RunConfig::group_seed)},
      {"group.tol", field(&RunConfig::group_tol)},
      {"workers", field(&RunConfig::workers, false)},
      {"out", field(&RunConfig::out, false)},
  };
  return table;
}

// Defaults that scale with the dimension: the grid work grows like points^(2n+1).
RunConfig defaults(int n, const std::string& phase) {
  RunConfig c;
  c.n = n;
  c.phase = phase;
  c.a.assign(static_cast<std::size_t>(std::max(n, 0)), 1.0);
  c.scaling_points = {{0.75, 0.25}, {0.5, 0.5}, {1.0 / 1.2, 1.0 / 1.5}, {1.0, 0.0}};
  if (n >= 2) {
    c.grid_points_x = 8;
    c.grid_points_t = 16;
    c.quad_nodes = 4;
    c.ladder_count = 4;
    c.ladder_cells_per_delta = 4;
    c.local_nodes = 8;
    c.x_samples = 5;
    c.norm_points_x = 6;
    c.norm_points_t = 12;
    c.norm_bounds = false;
    c.dump_fields = false;
  }
  return c;
}

template <typename T>
void require(bool ok, const std::string& key, const T& why) {
  if (!ok) bad(key, why);
}

void validate(const RunConfig& c) {
  require(c.n >= 1 && c.n <= 4, "n", "must be in 1..4");
  require(c.phase == "quadratic" || c.phase == "power", "phase.kind", "must be quadratic or power");
  if (c.phase == "quadratic") {
    require(static_cast<int>(c.a.size()) == c.n, "phase.a", "needs exactly n coefficients");
    for (double v : c.a) require(v != 0.0, "phase.a", "coefficients must be nonzero");
  }
  require(c.m >= 1 && c.m <= 8, "phase.m", "must be in 1..8");
  require(c.quad_rule == "polar" || c.quad_rule == "product", "quadrature.rule", "must be polar or product");
  require(c.workers >= 1, "workers", "must be >= 1");
  require(!c.out.empty(), "out", "must be non-empty");
  require(c.transform_nmax >= 1, "transform.nmax", "must be >= 1");
  require(c.transform_kmax >= 0, "transform.kmax", "must be >= 0");
  require(c.transform_xi_count >= 1, "transform.xi_count", "must be >= 1");
  require(c.transform_xi_extent >= 0.0, "transform.xi_extent", "must be >= 0");
  require(c.transform_quad_tol > 0.0 && c.transform_tol > 0.0, "transform.tol", "tolerances must be positive");
  require(c.modulus_kmax >= 0, "modulus.kmax", "must be >= 0");
  require(!c.spectral_N.empty() && !c.spectral_z_imag.empty(), "spectral.N", "z and N lists must be non-empty");
  for (int N : c.spectral_N) require(N >= 1, "spectral.N", "entries must be >= 1");
  for (int N : c.decay_N) require(N >= 1, "decay.N", "entries must be >= 1");
  require(c.spectral_alpha_max >= 0, "spectral.alpha_max", "must be >= 0");
  require(c.spectral_lambda_lo > 0.0 && c.spectral_lambda_hi > c.spectral_lambda_lo, "spectral.lambda_lo",
          "need 0 < lambda_lo < lambda_hi");
  require(c.spectral_lambda_per_sign >= 1 && c.upsilon_lambda_per_sign >= 1, "spectral.lambda_per_sign",
          "must be >= 1");
  require(c.upsilon_k_max >= 0, "upsilon.k_max", "must be >= 0");
  for (int m : c.vdc_m) require(m >= 2, "vdc.m", "entries must be >= 2");
  require(c.vdc_count >= 4, "vdc.count", "must be >= 4");
  for (double r : c.decay_re) require(r <= -1.0, "decay.re", "entries must be <= -1");
  for (double r : c.agreement_re) require(r > 0.0 && r <= 1.0, "agreement.re", "entries must lie in (0, 1]");
  require(c.decay_s_max > 2.0, "decay.s_max", "must exceed 2");
  require(c.agreement_step > 0.0 && c.agreement_extent >= 0.0, "agreement.step", "need step > 0, extent >= 0");
  require(c.group_triples >= 1, "group.triples", "must be >= 1");
  require(c.scan_k >= 2, "scan.k", "must be >= 2");
  require(c.norm_iterations >= 1, "norm.iterations", "must be >= 1");
  for (const auto& p : c.scaling_points) {
    require(p[0] >= 0.0 && p[0] <= 1.0 && p[1] >= 0.0 && p[1] <= 1.0, "scaling.points", "entries must lie in [0, 1]");
  }
  // Module-level invariants.
  try {
    c.measure().validate();
    const auto ctx = c.context();
    ctx.validate();
    c.ladder(ctx).validate();
    Grid::box(c.n, 4.0, 8.0, c.norm_points_x, c.norm_points_t).validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace

GraphMeasure RunConfig::measure() const {
  CutoffSpec cutoff;
  cutoff.resolution = cutoff_resolution;
  if (phase == "power") return GraphMeasure::power(n, m, cutoff);
  return GraphMeasure::quadratic(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())),
                                 cutoff);
}

ConvolveContext RunConfig::context() const {
  ConvolveContext ctx;
  ctx.grid = Grid::box(n, 4.0, 8.0, grid_points_x, grid_points_t);
  ctx.q.nodes_per_axis = quad_nodes;
  ctx.q.panels = quad_panels;
  ctx.q.interp_order = quad_interp_order;
  ctx.q.rule = quad_rule == "product" ? QuadratureSpec::Rule::product : QuadratureSpec::Rule::polar;
  ctx.workers = workers;
  ctx.local_nodes = local_nodes;
  ctx.x_samples_per_axis = x_samples;
  ctx.t_samples = t_samples;
  ctx.norm_iterations = norm_iterations;
  return ctx;
}

ScalingLadder RunConfig::ladder(const ConvolveContext& ctx) const {
  return ScalingLadder::geometric(ladder_first, ladder_count, ctx.grid.spacing(0), ladder_cells_per_delta);
}

json RunConfig::to_json() const {
  json out = json::object();
  for (const auto& [key, f] : fields()) out[key] = f.get(*this);
  return out;
}

std::string RunConfig::hash() const {
  json science = json::object();
  for (const auto& [key, f] : fields()) {
    if (f.hashed) science[key] = f.get(*this);
  }
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : science.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

RunConfig resolve_config(const json& file, const Overrides& flags) {
  if (!file.is_object()) throw ConfigError("config file must hold a flat JSON object");
  const auto& table = fields();
  for (const auto& [key, value] : file.items()) {
    if (!table.count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (value.is_object()) bad(key, "nested objects are not accepted; use dotted keys");
  }
  // n and the phase kind choose the defaults, so resolve them first.
  RunConfig probe;
  if (file.contains("n")) read("n", file["n"], probe.n);
  if (file.contains("phase.kind")) read("phase.kind", file["phase.kind"], probe.phase);
  if (flags.n) probe.n = *flags.n;
  if (flags.phase) probe.phase = *flags.phase;

  RunConfig c = defaults(probe.n, probe.phase);
  for (const auto& [key, value] : file.items()) table.at(key).set(c, key, value);
  if (flags.n) {
    c.n = *flags.n;
    if (!file.contains("phase.a")) c.a.assign(static_cast<std::size_t>(std::max(c.n, 0)), 1.0);
  }
  if (flags.phase) c.phase = *flags.phase;
  if (flags.m) c.m = *flags.m;
  if (flags.a) c.a = *flags.a;
  if (flags.kmax) c.transform_kmax = *flags.kmax;
  if (flags.nmax) c.transform_nmax = *flags.nmax;
  if (flags.workers) c.workers = *flags.workers;
  if (flags.out) c.out = *flags.out;
  validate(c);
  return c;
}

RunConfig load_config(const Overrides& flags) {
  json file = json::object();
  if (flags.config_path) {
    std::ifstream in(*flags.config_path);
    if (!in) throw ConfigError("cannot open config file '" + *flags.config_path + "'");
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("malformed config file '" + *flags.config_path + "': " + e.what());
    }
  }
  return resolve_config(file, flags);
}

std::vector<std::pair<std::string, std::string>> config_schema() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, f] : fields()) out.emplace_back(key, f.type);
  return out;
}

}  // namespace hconv::cli
