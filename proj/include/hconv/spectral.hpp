#pragma once

// Diagonal entries of the group Fourier transform of poliradial kernels,
// expressed through Laguerre transforms:
//   mu_{N,z}(alpha, lambda)   quadratic phase, product of radial factors
//   upsilon_{N,z}(k, lambda)  radial power phase |w|^{2m}
// the oscillatory factor R_lambda^, and a Plancherel-ratio calibration.

#include <functional>
#include <string>
#include <vector>

#include "hconv/kernels.hpp"
#include "hconv/measures.hpp"
#include "hconv/quadrature.hpp"
#include "hconv/specfun.hpp"

namespace hconv {

using MultiIndex = std::vector<int>;

struct DiagonalEntry {
  MultiIndex index;  // alpha, or {k} for upsilon
  double lambda = 0.0;
  Complex z{0.0, 0.0};
  int N = 1;
  Complex value{0.0, 0.0};
  double error = 0.0;
};

enum class RadialRoute {
  direct,       // quadrature in u = r^2
  convolution,  // |lambda|^{-1} (F_alpha^ * G_lambda^)(-2 sgn(lambda) a) / (2 pi)
};

/// integral_0^inf eta(r^2) e^{i lambda a r^2} r L_alpha(|lambda| r^2 / 2) e^{-|lambda| r^2 / 4} dr.
Integral<Complex> radial_factor(int alpha, double lambda, double a, const CutoffSpec& cutoff = {},
                                RadialRoute route = RadialRoute::direct);

/// I_{1-z}(-lambda) phi_N(lambda) prod_j radial_factor(alpha_j, lambda, a_j).
DiagonalEntry mu_entry(Complex z, int N, const MultiIndex& alpha, double lambda, const GraphMeasure& gm,
                       const MollifierSpec& mollifier = *MollifierSpec::shared());

/// 2^n |Gamma((1 - z)/2)|^{-1} ||H||_inf prod_j ||eta_j^||_1.
double mu_bound(Complex z, const GraphMeasure& gm, const MollifierSpec& mollifier = *MollifierSpec::shared());

/// (k!/(k+n-1)!) I_{1-z}(-lambda) phi_N(lambda)
///   * integral_0^inf eta_0(s^2) L_k^{n-1}(|lambda| s^2/2) e^{-|lambda| s^2/4} e^{i lambda s^{2m}} s^{2n-1} ds.
/// Accepts n, m >= 1 so that n = m = 1 can be compared with mu_entry.
DiagonalEntry upsilon_entry(Complex z, int N, int k, double lambda, int m, int n, const CutoffSpec& cutoff = {},
                            const MollifierSpec& mollifier = *MollifierSpec::shared());

/// R_lambda^(xi) = |lambda| integral_0^1 exp(i |lambda| (2^m sgn(lambda) tau^m - xi tau)) d tau.
Integral<Complex> R_lambda_hat(double lambda, int m, double xi);

struct SupEstimate {
  double value = 0.0;
  double argmax = 0.0;
};

/// sup over xi of |R_lambda^(xi)|: scaled window near the degenerate point,
/// a coarse scan over the stationary range, then golden-section refinement.
SupEstimate R_lambda_hat_sup(double lambda, int m);

/// max(1, sup over the sample of sup_xi |R_lambda^| / |lambda|^{(m-1)/m}).
double van_der_corput_constant(int m, const std::vector<double>& lambdas);

/// C with |upsilon| <= C |Gamma((1 - z)/2)|^{-1} on Re z = -(n + (1 - m)/m), n >= 2,
/// given the oscillation constant C_m.
double upsilon_uniform_constant(Complex z, int n, double c_m, const CutoffSpec& cutoff = {},
                                const MollifierSpec& mollifier = *MollifierSpec::shared());

/// One row of a mu sweep.
struct MuSweepRow {
  Complex z;
  int N;
  MultiIndex alpha;
  double lambda;
  double magnitude;
  double bound;
  double ratio;
};

struct MuSweepSpec {
  GraphMeasure gm;
  std::vector<Complex> z;
  std::vector<int> N;
  int alpha_max = 30;  // total order |alpha| <= alpha_max
  std::vector<double> lambdas;
  int workers = 1;
};

/// Every (z, N, alpha, lambda) entry with its bound. Radial factors are shared
/// across (z, N); the row order is deterministic.
std::vector<MuSweepRow> mu_sweep(const MuSweepSpec& spec);

/// Signed logarithmic grid: +-lambda for `per_sign` log-spaced magnitudes in [lo, hi].
std::vector<double> signed_log_grid(double lo, double hi, int per_sign);

/// Poliradial kernel K(w, t) = prod_j A_j(|w_j|) B(t).
struct SeparableKernel {
  std::string name;
  std::vector<std::function<double(double)>> radial;  // n entries
  std::function<double(double)> central;
  double radial_extent = 40.0;   // A_j negligible beyond
  double central_extent = 12.0;  // B negligible beyond
};

struct PlancherelOptions {
  double lambda_lo = 0.05;
  double tail_tol = 1e-7;  // relative Laguerre tail per lambda node
  int alpha_start = 32;
  int alpha_cap = 4096;
  int lambda_panels = 20;
  int workers = 1;
};

struct PlancherelResult {
  double ratio = 0.0;  // ||K||_2^2 / integral sum_alpha |mu|^2 |lambda|^n d lambda
  double kernel_norm2 = 0.0;
  double entry_integral = 0.0;
  int alpha_max = 0;  // largest per-axis truncation used
  double lambda_hi = 0.0;
  double small_lambda_tail = 0.0;  // extrapolated share below lambda_lo
};

/// Entries mu(alpha, lambda) = B^(lambda) prod_j integral A_j(r) L_{alpha_j}(|lambda| r^2/2) e^{-|lambda| r^2/4} r dr.
/// Throws AccuracyError if the alpha truncation cannot reach tail_tol below alpha_cap.
PlancherelResult plancherel_ratio(const SeparableKernel& kernel, const PlancherelOptions& opt = {});

}  // namespace hconv
