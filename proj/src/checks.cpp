#include "hconv/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hconv/convolve.hpp"
#include "hconv/fit.hpp"
#include "hconv/hgroup.hpp"

namespace hconv {

GroupSelfTest group_selftest(int triples, std::uint64_t seed) {
  if (triples < 1) throw DomainError("group_selftest: need at least one triple");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  auto point = [&](int n) {
    Eigen::VectorXd x(2 * n);
    for (auto& v : x) v = u(rng);
    return HPoint<double>(x, u(rng));
  };
  GroupSelfTest out;
  out.triples = triples;
  for (int i = 0; i < triples; ++i) {
    const int n = 1 + i % 3;
    const auto p = point(n), q = point(n), r = point(n);
    const auto left = (p * q) * r;
    const auto right = p * (q * r);
    out.max_associativity =
        std::max(out.max_associativity, euclidean_distance(left, right) / (1.0 + euclidean_norm(left)));
    out.max_inverse = std::max(out.max_inverse, euclidean_norm(p * group_inv(p)) / (1.0 + euclidean_norm(p)));
    out.max_identity =
        std::max(out.max_identity, euclidean_distance(p * HPoint<double>::identity(n), p) / (1.0 + euclidean_norm(p)));
  }
  return out;
}

DecayProfile kernel_decay_profile(Complex z, int N, double s_max) {
  if (!(z.real() <= -1.0)) throw DomainError("kernel_decay_profile: requires Re z <= -1");
  DecayProfile out;
  out.z = z;
  out.N = N;
  out.limit = z.real() == -1.0 ? std::abs(fractional_constant(z)) : 0.0;
  bool finite = true;
  for (double mag = (N + 1.0) / N; mag <= s_max; mag *= 1.25) {
    for (double s : {mag, -mag}) {
      const double r = std::abs(smoothed_kernel_eval({z, N}, s)) * std::pow(mag - 1.0 / N, 2);
      finite = finite && std::isfinite(r);
      out.s.push_back(s);
      out.ratio.push_back(r);
      out.sup = std::max(out.sup, r);
    }
  }
  if (out.ratio.empty()) throw DomainError("kernel_decay_profile: s_max below (N+1)/N");
  std::vector<double> mags, tail;
  for (std::size_t i = 0; i < out.s.size(); i += 2) {
    if (out.s[i] >= std::sqrt(s_max * (N + 1.0) / N)) {
      mags.push_back(out.s[i]);
      tail.push_back(0.5 * (out.ratio[i] + out.ratio[i + 1]));
    }
  }
  const bool vanishes = out.sup == 0.0;
  out.tail_slope = vanishes || mags.size() < 2 ? std::numeric_limits<double>::quiet_NaN() : fit_loglog(mags, tail).slope;
  bool capped, settled;
  if (out.limit > 0.0) {
    capped = out.sup <= 1.02 * out.limit;
    settled = std::abs(out.ratio.back() - out.limit) <= 0.05 * out.limit;
  } else {
    capped = true;
    settled = vanishes || out.tail_slope <= 0.0;
  }
  out.bounded = finite && capped && settled;
  return out;
}

double path_agreement(Complex z, int N, double lo, double hi, double step) {
  double worst = 0.0;
  for (double s = lo; s <= hi + 1e-12; s += step) {
    const Complex a = smoothed_kernel_eval({z, N, KernelPath::space}, s);
    const Complex b = smoothed_kernel_eval({z, N, KernelPath::frequency}, s);
    worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));
  }
  return worst;
}

VanDerCorputFit van_der_corput_fit(int m, int count) {
  if (m < 2 || count < 4) throw DomainError("van_der_corput_fit: need m >= 2 and count >= 4");
  VanDerCorputFit out;
  out.m = m;
  const double expected = (m - 1.0) / m;
  for (int i = 0; i < count; ++i) {
    const double lam = std::pow(10.0, 3.0 * i / (count - 1));
    const double sup = R_lambda_hat_sup(lam, m).value;
    out.lambdas.push_back(lam);
    out.sups.push_back(sup);
    out.normalized.push_back(sup / std::pow(lam, expected));
  }
  const auto fit = fit_loglog(out.lambdas, out.sups);
  out.slope = fit.slope;
  out.r2 = fit.r2;
  const std::size_t half = out.lambdas.size() / 2;
  const std::span<const double> upper_l(out.lambdas.data() + half, out.lambdas.size() - half);
  const std::span<const double> upper_r(out.normalized.data() + half, out.normalized.size() - half);
  out.trend = fit_loglog(upper_l, upper_r).slope;
  out.ok = std::abs(out.slope - expected) <= 0.05 && out.r2 >= 0.98 && out.trend <= 0.05;
  return out;
}

StructuralGaps structural_gaps(int points_x, int nodes, int workers) {
  using Field = SampledField<double>;
  const auto gm = GraphMeasure::quadratic(Eigen::VectorXd::Ones(1));
  const Grid g = Grid::reference(points_x, 2 * points_x);
  const Field f = Field::from_function(g, [](const double* p) {
    return std::exp(-(p[0] * p[0] + p[1] * p[1]) - 0.5 * p[2] * p[2]);
  });
  const Field h = Field::from_function(g, [](const double* p) {
    return std::exp(-0.7 * ((p[0] - 0.5) * (p[0] - 0.5) + p[1] * p[1]) - 0.3 * (p[2] - 1.0) * (p[2] - 1.0));
  });
  const QuadratureSpec q{nodes};
  const Field tf = apply_Tnu(f, gm, q, workers);
  const double a = inner_product(tf, h);
  const double b = inner_product(f, apply_adjoint(h, gm, q, workers));
  const HPoint<double> shift(Eigen::Vector2d(0.37, -0.21), 0.43);
  const Field lhs = translate(tf, shift);
  const Field rhs = apply_Tnu(translate(f, shift), gm, q, workers);
  return {points_x, nodes, std::abs(a - b) / std::abs(a), (lhs.values - rhs.values).norm() / tf.values.norm()};
}

std::vector<SeparableKernel> standard_plancherel_kernels() {
  return {
      {"gauss", {[](double r) { return std::exp(-r * r); }}, [](double t) { return t * std::exp(-t * t); }, 40.0, 12.0},
      {"cauchy",
       {[](double r) { return std::pow(1.0 + r * r, -3.0); }},
       [](double t) { return (1.0 - 2.0 * t * t) * std::exp(-t * t); },
       60.0,
       12.0},
      {"ring",
       {[](double r) { return r * r * std::exp(-0.5 * r * r); }},
       [](double t) { return t * std::exp(-0.5 * t * t); },
       40.0,
       14.0},
  };
}

}  // namespace hconv
