// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hconv/checks.hpp"
#include "hconv/specfun.hpp"
#include "hconv/spectral.hpp"
#include "hconv/typeset.hpp"

using namespace hconv;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// AC1: closed-form transforms against adaptive quadrature, n <= 3, k <= 10, 41 xi.
Verdict transform_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = transform_sweep(3, 10, symmetric_grid(10.0, 41), 1e-10);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.relerr);
  return {rows.size() == 3 * 11 * 41 && worst <= 1e-8 && secs <= 60.0,
          fmt("%.0f rows, max relerr %.3g <= 1e-8, %.1f s <= 60 s", double(rows.size()), worst, secs)};
}

// AC2: | |F^_{1,k}(xi)| - (1/4 + xi^2)^{-1/2} | <= 1e-10 for k <= 20.
Verdict modulus_identity() {
  double worst = 0.0;
  for (int k = 0; k <= 20; ++k) {
    for (double xi : symmetric_grid(10.0, 41)) {
      worst = std::max(worst, std::abs(std::abs(F_nk_hat(1, k, xi)) - 1.0 / std::sqrt(0.25 + xi * xi)));
    }
  }
  return {worst <= 1e-10, fmt("max gap %.3g <= 1e-10", worst)};
}

// AC3: every |mu| / bound <= 1 on the critical line for n = 1, 2.
Verdict uniform_l2_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t entries = 0;
  for (int n : {1, 2}) {
    MuSweepSpec spec;
    spec.gm = GraphMeasure::quadratic(Eigen::VectorXd::Ones(n));
    for (double y : {0.0, 1.0, 5.0}) spec.z.emplace_back(-n, y);
    spec.N = {1, 10, 100};
    spec.alpha_max = 30;
    spec.lambdas = signed_log_grid(1e-2, 1e3, 21);
    const auto rows = mu_sweep(spec);
    for (const auto& row : rows) worst = std::max(worst, row.ratio);
    entries += rows.size();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1.0 && secs <= 600.0,
          fmt("%.0f entries, max ratio %.3g <= 1, %.1f s <= 600 s", double(entries), worst, secs)};
}

// AC4: log sup |R_lambda^| slope (m-1)/m +- 0.05 on [1, 1e3]; normalized ratio bounded, no upward trend.
Verdict van_der_corput() {
  bool ok = true;
  std::string detail;
  for (int m : {2, 3}) {
    const auto f = van_der_corput_fit(m);
    const double top = *std::max_element(f.normalized.begin(), f.normalized.end());
    ok = ok && f.ok && std::isfinite(top);
    detail += fmt(m == 2 ? "m=%.0f slope %.4f (want %.4f) trend %.4f; " : "m=%.0f slope %.4f (want %.4f) trend %.4f", m, f.slope, (m - 1.0) / m, f.trend);
  }
  return {ok, detail};
}

// AC5: n = 1 quadratic scaling exponents within 0.1; infimum positive and stable.
Verdict scaling_exponents() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto gm = GraphMeasure::quadratic(Eigen::VectorXd::Ones(1));
  ConvolveContext ctx;
  ctx.grid = Grid::reference(32, 64);
  const auto ladder = ScalingLadder::geometric(0.25, 4, ctx.grid.spacing(0));
  const auto s = sample_scaling(gm, ladder, ctx, false);
  double worst = 0.0;
  for (const TypePoint pt : {TypePoint{0.75, 0.25}, TypePoint{0.5, 0.5}, TypePoint{1.0 / 1.2, 1.0 / 1.5}}) {
    worst = std::max(worst, std::abs(fit_exponent(s, pt.ip, pt.iq).exponent - predicted_exponent(1, pt)));
  }
  double lo = INFINITY, hi = 0.0;
  for (const auto& level : s.levels) {
    lo = std::min(lo, level.infimum);
    hi = std::max(hi, level.infimum);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 0.1 && lo > 0.0 && hi / lo < 2.0 && secs <= 1800.0,
          fmt("max exponent gap %.3g <= 0.1, infimum in [%.3g, %.3g] (ratio < 2), %.1f s", worst, lo, hi, secs)};
}

// AC6: three poliradial kernels give the same Plancherel ratio within 2%.
Verdict plancherel() {
  double lo = INFINITY, hi = 0.0;
  for (const auto& k : standard_plancherel_kernels()) {
    const double r = plancherel_ratio(k).ratio;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {hi / lo - 1.0 <= 0.02, fmt("ratios in [%.8f, %.8f], spread %.3g <= 0.02", lo, hi, hi / lo - 1.0)};
}

// AC7: bounded, trend-free decay for Re z in {-1, -2}; path agreement on Re z in (0, 1].
Verdict kernel_decay() {
  int profiles = 0, bad = 0;
  for (double re : {-1.0, -2.0}) {
    for (double im : {0.0, 1.0, 3.0}) {
      for (int N : {1, 4, 16}) {
        ++profiles;
        bad += !kernel_decay_profile(Complex(re, im), N, 100.0).bounded;
      }
    }
  }
  double gap = 0.0;
  for (double re : {0.1, 0.5, 0.9, 1.0}) {
    for (double im : {0.0, 2.0}) {
      for (int N : {1, 4, 16}) gap = std::max(gap, path_agreement(Complex(re, im), N, -10.0, 10.0, 1.7));
    }
  }
  return {bad == 0 && gap <= 1e-6,
          fmt("%.0f/%.0f profiles bounded, max path gap %.3g <= 1e-6", profiles - bad, profiles, gap)};
}

// AC8: group axioms, duality and commutation gaps, triangle identities.
Verdict structural() {
  const auto g = group_selftest(10000, 20240601);
  const bool group_ok = g.max_associativity <= 1e-12 && g.max_inverse <= 1e-12 && g.max_identity <= 1e-12;
  const auto coarse = structural_gaps(16, 6);
  const auto ref = structural_gaps(32, 8);
  const auto fine = structural_gaps(48, 12);
  const bool duality_ok = ref.duality <= 1e-3 && fine.duality < ref.duality && ref.duality < coarse.duality;
  const bool comm_ok = fine.commutation < ref.commutation && ref.commutation < coarse.commutation;
  double tri = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const auto c = thm1_triangle(n).c;
    tri = std::max({tri, std::abs(c.iq - ((2.0 * n + 1.0) * c.ip - 2.0 * n)), std::abs(c.ip + c.iq - 1.0),
                    std::abs(dual_point(c).ip - c.ip), std::abs(dual_point(c).iq - c.iq)});
  }
  std::string d = fmt("assoc %.2g; duality %.2g > %.2g > %.2g; ", g.max_associativity, coarse.duality, ref.duality,
                      fine.duality);
  d += fmt("commutation %.2g > %.2g > %.2g; triangle %.2g", coarse.commutation, ref.commutation, fine.commutation, tri);
  return {group_ok && duality_ok && comm_ok && tri <= 1e-12, d};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"AC1 Laguerre transform oracle", transform_oracle},
      {"AC2 n=1 modulus identity", modulus_identity},
      {"AC3 uniform L2 bound sweep", uniform_l2_bound},
      {"AC4 van der Corput envelope", van_der_corput},
      {"AC5 scaling exponents", scaling_exponents},
      {"AC6 Plancherel ratio constancy", plancherel},
      {"AC7 kernel decay and path agreement", kernel_decay},
      {"AC8 structural suites", structural},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
