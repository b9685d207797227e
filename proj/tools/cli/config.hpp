#pragma once

// Run configuration: a flat JSON object with dotted keys. Defaults depend on n
// and the phase kind; file keys override defaults and flags override the file.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hconv/measures.hpp"
#include "hconv/typeset.hpp"

namespace hconv::cli {

struct RunConfig {
  // measure
  int n = 1;
  std::string phase = "quadratic";  // quadratic | power
  std::vector<double> a;            // quadratic coefficients, length n
  int m = 2;                        // power exponent
  int cutoff_resolution = 2;

  // grid experiments
  int grid_points_x = 32;
  int grid_points_t = 64;
  int quad_nodes = 8;
  int quad_panels = 1;
  int quad_interp_order = 1;
  std::string quad_rule = "polar";  // polar | product
  double ladder_first = 0.25;
  int ladder_count = 4;
  int ladder_cells_per_delta = 8;
  int local_nodes = 32;
  int x_samples = 9;
  int t_samples = 4;
  std::vector<std::array<double, 2>> scaling_points;  // (1/p, 1/q)
  double scaling_tol = 0.1;
  bool dump_fields = true;  // f_delta and T f_delta on the base grid
  int scan_k = 5;
  bool norm_bounds = true;
  int norm_points_x = 16;
  int norm_points_t = 32;
  int norm_iterations = 20;

  // Laguerre transform oracle
  int transform_nmax = 3;
  int transform_kmax = 10;
  int transform_xi_count = 41;
  double transform_xi_extent = 10.0;
  double transform_quad_tol = 1e-10;
  double transform_tol = 1e-8;
  int modulus_kmax = 20;
  double modulus_tol = 1e-10;

  // spectral bounds
  std::vector<double> spectral_z_imag{0.0, 1.0, 5.0};
  std::vector<int> spectral_N{1, 10, 100};
  int spectral_alpha_max = 30;
  double spectral_lambda_lo = 1e-2;
  double spectral_lambda_hi = 1e3;
  int spectral_lambda_per_sign = 21;
  int upsilon_k_max = 6;
  int upsilon_lambda_per_sign = 7;
  std::vector<int> vdc_m{2, 3};
  int vdc_count = 13;
  double vdc_tol = 0.05;

  // kernel decay and path agreement
  std::vector<double> decay_re{-1.0, -2.0};
  std::vector<double> decay_im{0.0, 1.0, 3.0};
  std::vector<int> decay_N{1, 4, 16};
  double decay_s_max = 100.0;
  std::vector<double> agreement_re{0.1, 0.5, 0.9, 1.0};
  std::vector<double> agreement_im{0.0, 2.0};
  double agreement_extent = 10.0;
  double agreement_step = 1.7;
  double agreement_tol = 1e-6;

  double plancherel_tol = 0.02;

  int group_triples = 10000;
  std::uint64_t group_seed = 20240601;
  double group_tol = 1e-12;

  // run control; not part of the config hash
  int workers = 1;
  std::string out = "hconv_out";

  GraphMeasure measure() const;
  ConvolveContext context() const;
  ScalingLadder ladder(const ConvolveContext& ctx) const;

  /// Resolved configuration as a flat JSON object (every key, sorted).
  nlohmann::json to_json() const;
  /// FNV-1a 64 of the resolved science keys, as 16 hex digits.
  std::string hash() const;
};

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<int> n;
  std::optional<int> m;
  std::optional<std::string> phase;
  std::optional<std::vector<double>> a;
  std::optional<int> kmax;
  std::optional<int> nmax;
};

/// Loads the file (if any), applies flags and validates. Throws ConfigError.
RunConfig load_config(const Overrides& flags);

/// Same with the file contents given directly.
RunConfig resolve_config(const nlohmann::json& file, const Overrides& flags);

/// Every accepted key with its type, for documentation and error messages.
std::vector<std::pair<std::string, std::string>> config_schema();

}  // namespace hconv::cli
