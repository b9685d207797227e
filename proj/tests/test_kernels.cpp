#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "hconv/fit.hpp"
#include "hconv/kernels.hpp"
#include "hconv/quadrature.hpp"

using hconv::Complex;
using hconv::KernelPath;
using hconv::SmoothedKernel;

namespace {

const hconv::MollifierSpec& mol() { return *hconv::MollifierSpec::shared(); }

double rel_gap(Complex a, Complex b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

}  // namespace

TEST_CASE("fractional_constant zeros and values") {
  CHECK(std::abs(hconv::fractional_constant(Complex(0.0, 0.0))) == 0.0);
  CHECK(std::abs(hconv::fractional_constant(Complex(-2.0, 0.0))) == 0.0);
  CHECK(std::abs(hconv::fractional_constant(Complex(-4.0, 0.0))) == 0.0);
  // 2^{-1} / Gamma(1)
  CHECK(std::abs(hconv::fractional_constant(Complex(2.0, 0.0)) - 0.5) < 1e-15);
  // 2^{-1/2} / Gamma(1/2)
  CHECK(std::abs(hconv::fractional_constant(Complex(1.0, 0.0)) - 1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-15);
}

TEST_CASE("I_z_eval domain and modulus") {
  CHECK_THROWS_AS(hconv::I_z_eval(Complex(0.0, 1.0), 1.0), hconv::DomainError);
  CHECK_THROWS_AS(hconv::I_z_eval(Complex(-1.0, 0.0), 1.0), hconv::DomainError);
  CHECK_THROWS_AS(hconv::I_z_eval(Complex(0.5, 0.0), 0.0), hconv::DomainError);
  const Complex z(0.5, 2.0);
  // depends on |s| only
  CHECK(rel_gap(hconv::I_z_eval(z, 3.0), hconv::I_z_eval(z, -3.0)) < 1e-15);
  const Complex direct = hconv::fractional_constant(z) * std::exp((z - 1.0) * std::log(3.0));
  CHECK(rel_gap(hconv::I_z_eval(z, 3.0), direct) < 1e-14);
}

TEST_CASE("mollifier normalization and table") {
  CHECK(mol().sup_norm() == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-11));
  CHECK(std::abs(mol().hat_integral() - 1.0) < 1e-12);
  CHECK(mol().hat(1.0) == 0.0);
  CHECK(mol().hat(-1.2) == 0.0);
  CHECK(mol().hat(0.0) == doctest::Approx(1.0 / 1.5));
  double worst = 0.0;
  for (double x = 0.0; x < 900.0; x += 0.731) worst = std::max(worst, std::abs(mol().value(x) - mol().value_direct(x)));
  CHECK(worst < 1e-9);
}

TEST_CASE("mollifier_value scaling and sup bound") {
  const double sup = mol().sup_norm();
  for (double lam = -50.0; lam <= 50.0; lam += 0.37) {
    for (int N : {1, 3, 10}) {
      const double v = hconv::mollifier_value(mol(), N, lam);
      CHECK(std::abs(v) <= sup + 1e-15);
      CHECK(v == doctest::Approx(hconv::mollifier_value(mol(), 2 * N, 2.0 * lam)).epsilon(1e-14));
    }
  }
  CHECK(hconv::mollifier_value(mol(), 7, 0.0) == doctest::Approx(sup).epsilon(1e-15));
}

TEST_CASE("SmoothedKernel validation") {
  SmoothedKernel bad{Complex(0.5, 0.0), 0};
  CHECK_THROWS_AS(bad.validate(), hconv::DomainError);
  SmoothedKernel beyond_one{Complex(1.2, 0.0), 1, KernelPath::frequency};
  CHECK_THROWS_AS(hconv::smoothed_kernel_eval(beyond_one, 0.3), hconv::DomainError);
  SmoothedKernel space_inside{Complex(-1.0, 0.0), 1, KernelPath::space};
  CHECK_THROWS_AS(hconv::smoothed_kernel_eval(space_inside, 0.5), hconv::DomainError);
}

TEST_CASE("z = 1 gives the constant 1/sqrt(2 pi)") {
  // I_1 is constant and phi_N^ has unit mass.
  for (int N : {1, 4}) {
    for (double s : {0.0, 0.4, -3.0, 12.0}) {
      const Complex v = hconv::smoothed_kernel_eval({Complex(1.0, 0.0), N}, s);
      CHECK(std::abs(v - 1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-11);
      const Complex f = hconv::smoothed_kernel_eval({Complex(1.0, 0.0), N, KernelPath::frequency}, s);
      CHECK(std::abs(f - 1.0 / std::sqrt(2.0 * std::numbers::pi)) < 1e-11);
    }
  }
}

TEST_CASE("z = 0 reproduces phi_N^ with unit constant") {
  // I_0 = c delta; the observed c is 1.
  for (int N : {1, 4}) {
    for (double s : {0.0, 0.1, -0.2, 0.7}) {
      const Complex v = hconv::smoothed_kernel_eval({Complex(0.0, 0.0), N}, s);
      CHECK(std::abs(v - N * mol().hat(N * s)) < 1e-9);
    }
  }
}

TEST_CASE("z = -2 vanishes off the mollifier support and is -delta'' on it") {
  // I_{z+2}'' = (z+1) I_z, so I_{-2} = -I_0'' = -delta''.
  for (int N : {1, 4}) {
    for (double s : {(N + 1.0) / N, 2.5, -7.0}) {
      CHECK(std::abs(hconv::smoothed_kernel_eval({Complex(-2.0, 0.0), N}, s)) == 0.0);
    }
    for (double s : {0.0, 0.1, 0.2, -0.15}) {
      if (std::abs(s) * N >= 1.0) continue;
      const double t = N * s, h = 1e-4;
      const double d2 = (mol().hat(t + h) - 2.0 * mol().hat(t) + mol().hat(t - h)) / (h * h);
      const Complex v = hconv::smoothed_kernel_eval({Complex(-2.0, 0.0), N}, s);
      const double oracle = -N * N * N * d2;
      CHECK(std::abs(v - oracle) < 1e-6 * (N * N * N + std::abs(oracle)));
    }
  }
}

TEST_CASE("frequency and space paths agree on 0 < Re z <= 1") {
  double worst = 0.0;
  for (Complex z : {Complex(0.1, 0.0), Complex(0.5, 0.0), Complex(0.9, 0.0), Complex(0.5, 2.0), Complex(0.05, 1.0),
                    Complex(0.99, 0.0), Complex(1.0, 2.0), Complex(1.0, -0.5)}) {
    for (int N : {1, 4}) {
      for (double s = -10.0; s <= 10.0; s += 1.7) {
        const Complex a = hconv::smoothed_kernel_eval({z, N, KernelPath::space}, s);
        const Complex b = hconv::smoothed_kernel_eval({z, N, KernelPath::frequency}, s);
        worst = std::max(worst, rel_gap(a, b));
      }
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("automatic path is continuous across the switch") {
  for (Complex z : {Complex(-1.0, 0.0), Complex(-1.0, 1.0)}) {
    const int N = 4;
    const double s = (N + 1.0) / N;
    const Complex a = hconv::smoothed_kernel_eval({z, N, KernelPath::space}, s + 1e-3);
    const Complex b = hconv::smoothed_kernel_eval({z, N, KernelPath::frequency}, s + 1e-3);
    CHECK(rel_gap(a, b) < 1e-6);
  }
}

TEST_CASE("decay ratio |K(s)| |s - sgn(s)/N|^2 is bounded without growth") {
  // Far out K ~ I_z, so the ratio tends to |c_z| on Re z = -1 and to 0 on Re z = -2.
  for (Complex z : {Complex(-1.0, 0.0), Complex(-1.0, 1.0), Complex(-2.0, 1.0)}) {
    const double limit = std::abs(hconv::fractional_constant(z));
    for (int N : {1, 4, 16}) {
      double worst = 0.0, first = 0.0, last = 0.0;
      for (double mag = (N + 1.0) / N; mag <= 100.0; mag *= 1.25) {
        for (double s : {mag, -mag}) {
          const double r = std::abs(hconv::smoothed_kernel_eval({z, N}, s)) * std::pow(mag - 1.0 / N, 2);
          REQUIRE(std::isfinite(r));
          worst = std::max(worst, r);
          if (first == 0.0) first = r;
          last = r;
        }
      }
      if (z.real() == -1.0) {
        CHECK(worst <= 1.01 * limit);
        CHECK(std::abs(last - limit) <= 0.03 * limit);
      } else {
        CHECK(worst <= 1.1 * first);
        CHECK(last <= 0.5 * first);
      }
    }
  }
}

TEST_CASE("smoothed kernel is integrable for Re z <= -1") {
  for (Complex z : {Complex(-1.0, 0.0), Complex(-1.0, 2.0)}) {
    SmoothedKernel k{z, 4};
    auto abs_k = [&](double s) { return std::abs(hconv::smoothed_kernel_eval(k, s)); };
    const hconv::CompositeRule inner = hconv::CompositeRule::make(-10.0, 10.0, 80, 8);
    const hconv::CompositeRule outer = hconv::CompositeRule::make(10.0, 80.0, 40, 8);
    double l1 = 0.0, l2 = 0.0, tail1 = 0.0;
    for (std::size_t i = 0; i < inner.nodes.size(); ++i) {
      const double v = abs_k(inner.nodes[i]);
      l1 += inner.weights[i] * v;
      l2 += inner.weights[i] * v * v;
    }
    for (std::size_t i = 0; i < outer.nodes.size(); ++i) {
      tail1 += 2.0 * outer.weights[i] * abs_k(outer.nodes[i]);
    }
    CHECK(std::isfinite(l1));
    CHECK(std::isfinite(l2));
    // |K| ~ s^{-2} far out, so the [10, 80] shell is small against the core.
    CHECK(tail1 < 0.1 * l1);
  }
}

TEST_CASE("nu_conv_J support, plateau and factorization") {
  const auto gm = hconv::GraphMeasure::quadratic(Eigen::VectorXd::Constant(1, 1.0));
  const SmoothedKernel k{Complex(-1.0, 0.5), 2};
  Eigen::VectorXd x(2);
  x << 1.5, 0.0;
  CHECK(std::abs(hconv::nu_conv_J(gm, k, x, 0.3)) == 0.0);
  x << 0.0, 0.0;
  CHECK(std::abs(hconv::nu_conv_J(gm, k, x, 0.0) - hconv::smoothed_kernel_eval(k, 0.0)) < 1e-15);
  x << 0.6, 0.5;
  const double phi = 0.61;
  const double eta = hconv::eval_density(gm, x);
  for (double sigma : {-1.0, 0.61, 2.0, 5.5}) {
    const Complex v = hconv::nu_conv_J(gm, k, x, sigma);
    CHECK(std::abs(v - eta * hconv::smoothed_kernel_eval(k, sigma - phi)) < 1e-14);
  }
}
