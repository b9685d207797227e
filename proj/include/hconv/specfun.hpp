#pragma once

// Special functions: complex Gamma, generalized Laguerre polynomials, the
// Laguerre-weighted profiles F_{n,k} and their closed-form Fourier transforms.
//
// Fourier convention used throughout the library:
//   g^(xi) = integral of g(sigma) exp(-i sigma xi) d sigma.

#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "hconv/quadrature.hpp"

namespace hconv {

using Complex = std::complex<double>;

/// Gamma(z) for complex z; throws PoleError at non-positive integers.
Complex gamma_complex(Complex z);

/// 1 / Gamma(z), an entire function (exactly zero at non-positive integers).
Complex rgamma(Complex z);

/// sin(pi x) and cos(pi x) with exact zeros at the integers / half-integers.
double sin_pi(double x);
double cos_pi(double x);

/// Generalized Laguerre polynomial L_k^{(alpha)}(s) by the three-term recurrence.
double laguerre(int k, int alpha, double s);

/// L_j^{(alpha)}(s) * exp(-s / 2) for j = 0..kmax, computed without forming
/// exp(s / 2)-sized intermediates.
Eigen::VectorXd laguerre_functions(int kmax, int alpha, double s);

/// F_{n,k}(sigma) = 1_{sigma > 0} L_k^{(n-1)}(sigma) exp(-sigma/2) sigma^{n-1}.
double F_nk(int n, int k, double sigma);

/// Closed-form transform ((k+n-1)!/k!) (-1/2 + i xi)^k / (1/2 + i xi)^{k+n}.
/// Powers are taken in polar form. Throws RangeError if k + n - 1 > 170.
Complex F_nk_hat(int n, int k, double xi);

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// Adaptive estimate of integral_domain f(sigma) exp(-i sigma xi) d sigma.
/// Infinite upper limits are handled panel by panel (f must decay).
/// Throws AccuracyError if `tol` is not reached.
Integral<Complex> fourier_quadrature(const std::function<Complex(double)>& f, double xi, Interval domain,
                                     double tol);

/// One closed-form versus quadrature comparison of F_nk_hat.
struct TransformCheck {
  int n = 1;
  int k = 0;
  double xi = 0.0;
  Complex closed{0.0, 0.0};
  Complex quadrature{0.0, 0.0};
  double relerr = 0.0;
};

/// Every (n, k, xi) with 1 <= n <= nmax, 0 <= k <= kmax, xi on `xis`, in that
/// nesting order. The quadrature tolerance is tol * max(1, |closed form|).
std::vector<TransformCheck> transform_sweep(int nmax, int kmax, const std::vector<double>& xis, double tol = 1e-10,
                                            int workers = 1);

/// `count` equally spaced points on [-extent, extent].
std::vector<double> symmetric_grid(double extent, int count);

}  // namespace hconv
