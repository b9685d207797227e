#include "hconv/specfun.hpp"

#include "hconv/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "hconv/errors.hpp"

namespace hconv {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(Complex z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::nearbyint(z.real());
}

// log Gamma(z) for Re z >= 1/2 via the Lanczos approximation.
Complex log_gamma_right(Complex z) {
  z -= 1.0;
  Complex series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (z + static_cast<double>(i));
  const Complex t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

// sin(pi z) with the real part reduced before scaling by pi.
Complex sin_pi_complex(Complex z) {
  const double y = std::numbers::pi * z.imag();
  return {sin_pi(z.real()) * std::cosh(y), cos_pi(z.real()) * std::sinh(y)};
}

}  // namespace

double sin_pi(double x) {
  if (x == std::nearbyint(x)) return 0.0;
  double r = std::fmod(x, 2.0);
  if (r > 1.0) r -= 2.0;
  if (r < -1.0) r += 2.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

double cos_pi(double x) { return sin_pi(x + 0.5); }

Complex gamma_complex(Complex z) {
  if (is_nonpositive_integer(z)) {
    throw PoleError("gamma_complex: pole at z = " + std::to_string(z.real()));
  }
  if (z.real() < 0.5) {
    // Reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z).
    return std::numbers::pi / (sin_pi_complex(z) * std::exp(log_gamma_right(1.0 - z)));
  }
  return std::exp(log_gamma_right(z));
}

Complex rgamma(Complex z) {
  if (is_nonpositive_integer(z)) return 0.0;
  if (z.real() < 0.5) {
    return sin_pi_complex(z) * std::exp(log_gamma_right(1.0 - z)) / std::numbers::pi;
  }
  return std::exp(-log_gamma_right(z));
}

double laguerre(int k, int alpha, double s) {
  if (k < 0) throw DomainError("laguerre: degree must be non-negative");
  if (alpha < 0) throw DomainError("laguerre: order must be non-negative");
  double prev = 1.0;
  if (k == 0) return prev;
  double cur = 1.0 + alpha - s;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + 1.0 + alpha - s) * cur - (j + alpha) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

Eigen::VectorXd laguerre_functions(int kmax, int alpha, double s) {
  if (kmax < 0) throw DomainError("laguerre_functions: kmax must be non-negative");
  Eigen::VectorXd out(kmax + 1);
  // The recurrence is linear, so seeding it with exp(-s/2) scales every term.
  out[0] = std::exp(-0.5 * s);
  if (kmax >= 1) out[1] = (1.0 + alpha - s) * out[0];
  for (int j = 1; j < kmax; ++j) {
    out[j + 1] = ((2.0 * j + 1.0 + alpha - s) * out[j] - (j + alpha) * out[j - 1]) / (j + 1.0);
  }
  return out;
}

double F_nk(int n, int k, double sigma) {
  if (n < 1) throw DomainError("F_nk: n must be >= 1");
  if (!(sigma > 0.0)) return 0.0;
  return laguerre(k, n - 1, sigma) * std::exp(-0.5 * sigma) * std::pow(sigma, n - 1);
}

Complex F_nk_hat(int n, int k, double xi) {
  if (n < 1 || k < 0) throw DomainError("F_nk_hat: need n >= 1 and k >= 0");
  if (k + n - 1 > 170) {
    throw RangeError("F_nk_hat: (k+n-1)! overflows for k + n - 1 = " + std::to_string(k + n - 1));
  }
  const double log_prefactor = std::lgamma(k + n) - std::lgamma(k + 1.0);
  // |-1/2 + i xi| = |1/2 + i xi|, so the modulus is r^{-n}.
  const double r = std::hypot(0.5, xi);
  const double arg = k * std::atan2(xi, -0.5) - (k + n) * std::atan2(xi, 0.5);
  return std::polar(std::exp(log_prefactor - n * std::log(r)), arg);
}

Integral<Complex> fourier_quadrature(const std::function<Complex(double)>& f, double xi, Interval domain,
                                     double tol) {
  if (!(domain.hi > domain.lo)) throw DomainError("fourier_quadrature: empty domain");
  auto integrand = [&](double s) { return f(s) * std::polar(1.0, -s * xi); };
  QuadOptions opt;
  opt.abs_tol = tol;
  opt.rel_tol = 0.0;
  opt.max_intervals = 20000;
  Integral<Complex> result;
  if (std::isinf(domain.hi)) {
    // Panels of about one decay length; oscillation is resolved adaptively.
    result = integrate_to_infinity(integrand, domain.lo, opt, 8.0, 2000);
  } else {
    result = integrate(integrand, domain.lo, domain.hi, opt);
  }
  if (!result.converged || result.error > tol) {
    throw AccuracyError("fourier_quadrature: tolerance not reached", result.error);
  }
  return result;
}

std::vector<double> symmetric_grid(double extent, int count) {
  if (count < 1) throw DomainError("symmetric_grid: count must be >= 1");
  if (count == 1) return {0.0};
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = -extent + 2.0 * extent * i / (count - 1);
  return out;
}

std::vector<TransformCheck> transform_sweep(int nmax, int kmax, const std::vector<double>& xis, double tol,
                                            int workers) {
  if (nmax < 1 || kmax < 0) throw DomainError("transform_sweep: need nmax >= 1 and kmax >= 0");
  std::vector<TransformCheck> rows;
  for (int n = 1; n <= nmax; ++n) {
    for (int k = 0; k <= kmax; ++k) {
      for (double xi : xis) rows.push_back({n, k, xi});
    }
  }
  parallel_for(rows.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto& r = rows[i];
      r.closed = F_nk_hat(r.n, r.k, r.xi);
      const int n = r.n, k = r.k;
      const double scaled = tol * std::max(1.0, std::abs(r.closed));
      r.quadrature = fourier_quadrature([n, k](double s) { return Complex(F_nk(n, k, s)); }, r.xi, {}, scaled).value;
      r.relerr = std::abs(r.quadrature - r.closed) / std::abs(r.closed);
    }
  });
  return rows;
}

}  // namespace hconv
