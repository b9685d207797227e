#pragma once

// Self-checks shared by the command-line driver and the acceptance suite.

#include <cstdint>
#include <vector>

#include "hconv/kernels.hpp"
#include "hconv/spectral.hpp"

namespace hconv {

struct GroupSelfTest {
  int triples = 0;
  double max_associativity = 0.0;  // |(pq)r - p(qr)| / (1 + |(pq)r|)
  double max_inverse = 0.0;        // |p p^{-1}| / (1 + |p|)
  double max_identity = 0.0;       // |p e - p| / (1 + |p|)
};

/// Random triples with n cycling through 1..3 and coordinates in [-10, 10].
GroupSelfTest group_selftest(int triples, std::uint64_t seed);

/// |K(s)| |s - sgn(s)/N|^2 on |s| = (N+1)/N * 1.25^j <= s_max, both signs.
struct DecayProfile {
  Complex z;
  int N = 1;
  std::vector<double> s;
  std::vector<double> ratio;
  double sup = 0.0;
  double limit = 0.0;       // |c_z| on Re z = -1, 0 for Re z < -1
  double tail_slope = 0.0;  // log-log slope over the outer half of |s| (NaN if the ratio vanishes)
  bool bounded = false;
};

/// Bounded and trend-free means: every value finite, and
///   Re z = -1:  sup <= 1.02 |c_z| and the far end within 5% of |c_z|;
///   Re z < -1:  the ratio vanishes identically or tail_slope <= 0.
DecayProfile kernel_decay_profile(Complex z, int N, double s_max);

/// max relative gap between the space and frequency paths on s = lo, lo + step, ... <= hi.
double path_agreement(Complex z, int N, double lo, double hi, double step);

/// log sup_xi |R_lambda^| against log lambda on `count` log-spaced lambda in [1, 1e3].
struct VanDerCorputFit {
  int m = 2;
  std::vector<double> lambdas;
  std::vector<double> sups;
  std::vector<double> normalized;  // sup / lambda^{(m-1)/m}
  double slope = 0.0;
  double r2 = 0.0;
  double trend = 0.0;  // log-log slope of the normalized ratio over the upper half of the range
  bool ok = false;     // |slope - (m-1)/m| <= 0.05, r2 >= 0.98, trend <= 0.05
};

VanDerCorputFit van_der_corput_fit(int m, int count = 13);

/// Relative gaps for two fixed Gaussians f, g on the n = 1 reference box with
/// `points_x` x-points, 2 points_x t-points and `nodes` polar nodes:
///   duality      |<T f, g> - <f, T* g>| / |<T f, g>|
///   commutation  |L_h T f - T L_h f| / |T f| for a fixed shift h
struct StructuralGaps {
  int points_x = 0;
  int nodes = 0;
  double duality = 0.0;
  double commutation = 0.0;
};

StructuralGaps structural_gaps(int points_x, int nodes, int workers = 1);

/// Gaussian, Cauchy-type and ring-shaped separable kernels for the n = 1 Plancherel check.
std::vector<SeparableKernel> standard_plancherel_kernels();

}  // namespace hconv
