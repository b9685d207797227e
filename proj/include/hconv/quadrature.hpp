#pragma once

// One-dimensional quadrature: fixed Gauss-Legendre rules and a globally
// adaptive Gauss-Kronrod (10/21) integrator for real or complex integrands.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

#include "hconv/errors.hpp"

namespace hconv {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussLegendre& get(int n);
};

/// Composite Gauss-Legendre nodes on [a, b] with `panels` equal panels.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static CompositeRule make(double a, double b, int panels, int order = 16);
};

template <typename T>
struct Integral {
  T value{};
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

struct QuadOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

namespace detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

// Kronrod 21-point extension of the 10-point Gauss rule.
inline constexpr double kKronrodNodes[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double kKronrodWeights[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525428500, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double kGaussWeights[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <typename T>
struct Segment {
  double a, b;
  T value;
  double error;
  double floor;  // rounding level, 50 eps integral |f|
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename T, typename F>
Segment<T> kronrod21(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const T fc = f(c);
  T kronrod = fc * kKronrodWeights[10];
  double absolute = magnitude(fc) * kKronrodWeights[10];
  T gauss = T{};
  for (int i = 0; i < 10; ++i) {
    const double dx = h * kKronrodNodes[i];
    const T fl = f(c - dx), fr = f(c + dx);
    const T sum = fl + fr;
    kronrod += sum * kKronrodWeights[i];
    absolute += (magnitude(fl) + magnitude(fr)) * kKronrodWeights[i];
    if (i % 2 == 1) gauss += sum * kGaussWeights[i / 2];
  }
  kronrod *= h;
  gauss *= h;
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() * std::abs(h) * absolute;
  return {a, b, kronrod, magnitude(kronrod - gauss), floor};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration over the union of consecutive
/// intervals [b0, b1], [b1, b2], ... given by `breakpoints`.
template <typename F>
auto integrate(F&& f, std::span<const double> breakpoints, const QuadOptions& opt = {})
    -> Integral<std::decay_t<decltype(f(0.0))>> {
  using T = std::decay_t<decltype(f(0.0))>;
  if (breakpoints.size() < 2) throw DomainError("integrate: need at least two breakpoints");
  std::priority_queue<detail::Segment<T>> heap;
  Integral<T> out;
  T total{};
  double total_error = 0.0;
  double total_floor = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    auto s = detail::kronrod21<T>(f, breakpoints[i], breakpoints[i + 1]);
    out.evaluations += 21;
    total += s.value;
    total_error += s.error;
    total_floor += s.floor;
    heap.push(s);
  }
  int intervals = static_cast<int>(heap.size());
  // Errors at the rounding floor cannot be reduced by subdivision.
  auto tolerance = [&] { return std::max({opt.abs_tol, opt.rel_tol * detail::magnitude(total), total_floor}); };
  while (!heap.empty() && total_error > tolerance()) {
    if (intervals >= opt.max_intervals) {
      out.converged = false;
      break;
    }
    const auto worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    auto left = detail::kronrod21<T>(f, worst.a, mid);
    auto right = detail::kronrod21<T>(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    total_floor += left.floor + right.floor - worst.floor;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum from the segments to shed accumulated cancellation in `total`.
  T resummed{};
  double err = 0.0;
  double floor = 0.0;
  std::vector<detail::Segment<T>> segs;
  segs.reserve(heap.size());
  while (!heap.empty()) {
    segs.push_back(heap.top());
    heap.pop();
  }
  std::sort(segs.begin(), segs.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  for (const auto& s : segs) {
    resummed += s.value;
    err += s.error;
    floor += s.floor;
  }
  out.value = resummed;
  out.error = err;
  if (err > std::max({opt.abs_tol, opt.rel_tol * detail::magnitude(resummed), floor})) out.converged = false;
  return out;
}

template <typename F>
auto integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  const double bp[2] = {a, b};
  return integrate(std::forward<F>(f), std::span<const double>(bp, 2), opt);
}

/// Integral over [a, inf) of a decaying integrand, accumulated panel by panel
/// until two consecutive panels contribute below the absolute tolerance.
template <typename F>
auto integrate_to_infinity(F&& f, double a, const QuadOptions& opt = {}, double panel = 16.0,
                           int max_panels = 400) -> Integral<std::decay_t<decltype(f(0.0))>> {
  using T = std::decay_t<decltype(f(0.0))>;
  Integral<T> out;
  int quiet = 0;
  double lo = a;
  for (int p = 0; p < max_panels; ++p) {
    QuadOptions local = opt;
    local.abs_tol = opt.abs_tol / 32.0;
    auto piece = integrate(f, lo, lo + panel, local);
    out.value += piece.value;
    out.error += piece.error;
    out.evaluations += piece.evaluations;
    out.converged = out.converged && piece.converged;
    lo += panel;
    if (detail::magnitude(piece.value) + piece.error < 1e-3 * opt.abs_tol) {
      if (++quiet >= 2) return out;
    } else {
      quiet = 0;
    }
  }
  out.converged = false;
  return out;
}

}  // namespace hconv
