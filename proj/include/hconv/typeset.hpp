#pragma once

// Type-set geometry in the (1/p, 1/q) square, the scaling experiments built on
// f_delta = indicator of the Euclidean ball B(2 delta) in R^{2n+1}, a p -> q
// norm lower-bound estimator, and the scan driver.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hconv/convolve.hpp"
#include "hconv/fit.hpp"
#include "hconv/measures.hpp"

namespace hconv {

struct TypePoint {
  double ip = 0.0;  // 1/p
  double iq = 0.0;  // 1/q

  void validate() const;
};

struct Triangle {
  TypePoint a, b, c;

  double signed_area() const;
  void validate() const;
};

/// (0,0), (1,1), ((2n+1)/(2n+2), 1/(2n+2)).
Triangle thm1_triangle(int n);

/// ((2(1+mn) - m) / (2(1+mn)), m / (2(1+mn))).
TypePoint thm2_vertex(int n, int m);

/// (0,0), (1,1), thm2_vertex(n, m).
Triangle thm2_triangle(int n, int m);

/// Closed barycentric membership with tolerance `tol`.
bool contains(const Triangle& tri, const TypePoint& pt, double tol = 1e-12);

/// Exponent of ||T f_delta||_q / ||f_delta||_p in delta: 2n + 1/q - (2n+1)/p.
double predicted_exponent(int n, const TypePoint& pt);
/// Same for the adjoint experiment at the dual point (1 - 1/q, 1 - 1/p): (2n+1)/q - 1/p.
double predicted_dual_exponent(int n, const TypePoint& pt);
/// (1 - 1/q, 1 - 1/p).
TypePoint dual_point(const TypePoint& pt);

struct ScalingLadder {
  std::vector<double> deltas;  // strictly decreasing in (0, 1)
  std::vector<int> refine;     // local grid spacing = base spacing / refine

  /// deltas = first, first/2, ... (count values); refine chosen so each delta spans
  /// `cells_per_delta` cells of the local grid.
  static ScalingLadder geometric(double first, int count, double base_spacing, int cells_per_delta = 8);

  void validate() const;
};

/// Numerical context shared by the grid experiments.
struct ConvolveContext {
  Grid grid = Grid::reference(16, 32);  // base grid; also the norm-estimator grid
  QuadratureSpec q{8};
  int workers = 1;
  int local_nodes = 32;        // product nodes per axis for the y-box around supp f_delta
  int x_samples_per_axis = 9;  // lattice on D = unit ball
  int t_samples = 4;           // per x, across |t - phi(x)| <= delta/4
  int norm_iterations = 20;

  void validate() const;
};

/// T f_delta (or T* f_delta) sampled on A_delta with quadrature weights.
struct DeltaSamples {
  double delta = 0.0;
  double spacing = 0.0;     // local grid spacing (x axes)
  double f_measure = 0.0;   // ||f_delta||_1 on the local grid; ||f_delta||_p = f_measure^{1/p}
  Eigen::VectorXd values;   // operator output at the sample points
  Eigen::VectorXd weights;  // sum = |A_delta| = |D| delta / 2
  double infimum = 0.0;     // min value / delta^{2n}
};

struct ScalingSamples {
  int n = 1;
  bool adjoint = false;
  double radius_factor = 0.0;  // F_{delta,x} radius / delta = 1 / (4n (1 + sup |grad phi|))
  std::vector<DeltaSamples> levels;
};

/// Samples T f_delta on A_delta = {x in D, |t - phi(x)| <= delta/4}, or T* f_delta on
/// A*_delta = {x in D, |t + phi(-x)| <= delta/4} when `adjoint`.
/// Throws ResolutionError when some delta spans fewer than 4 local cells.
ScalingSamples sample_scaling(const GraphMeasure& gm, const ScalingLadder& ladder, const ConvolveContext& ctx,
                              bool adjoint);

struct ExponentFit {
  double exponent = 0.0;
  double r2 = 0.0;
  double max_residual = 0.0;  // log units
  bool ok = false;            // r2 >= 0.98, or a flat fit with max residual <= 0.02
  std::vector<double> ratios;
};

/// Log-log least squares of ||values||_{L^q(A_delta)} / ||f_delta||_p against delta.
ExponentFit fit_exponent(const ScalingSamples& s, double ip, double iq);

struct ScanResult {
  TypePoint point;
  double fitted = std::numeric_limits<double>::quiet_NaN();     // min of primary and dual
  double predicted = std::numeric_limits<double>::quiet_NaN();  // min of primary and dual
  double fitted_primary = std::numeric_limits<double>::quiet_NaN();
  double fitted_dual = std::numeric_limits<double>::quiet_NaN();
  double predicted_primary = std::numeric_limits<double>::quiet_NaN();
  double predicted_dual = std::numeric_limits<double>::quiet_NaN();
  double norm_lb = std::numeric_limits<double>::quiet_NaN();  // NaN when p or q is 1 or infinity
  double r2 = std::numeric_limits<double>::quiet_NaN();       // smaller of the two fits
  bool fit_ok = false;
  bool inside_thm1 = false;
  std::optional<bool> inside_thm2;  // power phase with n, m >= 2 only
  bool violates_p_le_q = false;     // 1/p < 1/q
  std::vector<double> infimum;      // per delta, T f_delta / delta^{2n} on A_delta
  std::string error;                // non-empty if this point failed
};

/// Primary experiment at pt.
ScanResult scaling_experiment(const TypePoint& pt, const GraphMeasure& gm, const ScalingLadder& ladder,
                              const ConvolveContext& ctx);

/// Adjoint experiment at dual_point(pt); the exponent probes 1/q >= 1/((2n+1) p).
ScanResult dual_scaling_experiment(const TypePoint& pt, const GraphMeasure& gm, const ScalingLadder& ladder,
                                   const ConvolveContext& ctx);

/// A linear map on grid values with its adjoint under the cell-volume pairing.
struct OperatorPair {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> adjoint;
  double cell_volume = 1.0;
  Eigen::Index size = 0;
};

struct NormEstimate {
  double value = 0.0;           // running maximum of ||A f||_q / ||f||_p
  std::vector<double> history;  // non-decreasing
};

/// Nonlinear power iteration f <- J_{p'}(A* J_q(A f)) from the start vector
/// (all ones when empty). Requires 1 < p, q < infinity.
NormEstimate norm_lower_bound(const OperatorPair& op, double p, double q, int iterations,
                              const Eigen::VectorXd& start = {});

/// norm_lower_bound for T_nu on ctx.grid with apply_Tnu / apply_adjoint.
NormEstimate pq_norm_lower_bound(const TypePoint& pt, const GraphMeasure& gm, const ConvolveContext& ctx,
                                 int iterations);

struct ScanOptions {
  bool norm_bounds = true;
};

/// Both experiments and the norm estimator at every point. Per-point failures are
/// recorded in ScanResult::error; results are in input order.
std::vector<ScanResult> scan(const std::vector<TypePoint>& points, const GraphMeasure& gm,
                             const ScalingLadder& ladder, const ConvolveContext& ctx, const ScanOptions& opt = {});

/// {0, 1/(k-1), ..., 1}^2 in row order (ip outer).
std::vector<TypePoint> square_grid(int k);

}  // namespace hconv
