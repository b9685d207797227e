#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hconv/measures.hpp"
#include "hconv/quadrature.hpp"

using Vec = Eigen::VectorXd;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("eval_bump plateau, support and evenness") {
  const hconv::CutoffSpec c;
  CHECK(hconv::eval_bump(c, 0.0) == 1.0);
  CHECK(hconv::eval_bump(c, 1.0) == 1.0);
  CHECK(hconv::eval_bump(c, -0.7) == 1.0);
  CHECK(hconv::eval_bump(c, 2.5) == 0.0);
  CHECK(hconv::eval_bump(c, 2.0) == 0.0);
  const double mid = hconv::eval_bump(c, 1.5);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(mid == hconv::eval_bump(c, -1.5));
  CHECK(mid == doctest::Approx(0.5));
}

TEST_CASE("eval_bump is bounded with bounded divided differences") {
  const hconv::CutoffSpec c;
  const double h = 1e-3;
  double max_d1 = 0.0, max_d2 = 0.0;
  for (double t = -2.5; t <= 2.5; t += h) {
    const double f0 = hconv::eval_bump(c, t - h), f1 = hconv::eval_bump(c, t), f2 = hconv::eval_bump(c, t + h);
    REQUIRE(f1 >= 0.0);
    REQUIRE(f1 <= 1.0);
    max_d1 = std::max(max_d1, std::abs(f2 - f0) / (2 * h));
    max_d2 = std::max(max_d2, std::abs(f2 - 2 * f1 + f0) / (h * h));
  }
  CHECK(max_d1 < 5.0);
  CHECK(max_d2 < 50.0);
  // Refining h does not blow the second difference up (no kink).
  const double h2 = h / 4;
  double max_d2_fine = 0.0;
  for (double t = -2.5; t <= 2.5; t += h2) {
    const double f0 = hconv::eval_bump(c, t - h2), f1 = hconv::eval_bump(c, t), f2 = hconv::eval_bump(c, t + h2);
    max_d2_fine = std::max(max_d2_fine, std::abs(f2 - 2 * f1 + f0) / (h2 * h2));
  }
  CHECK(max_d2_fine < 1.05 * max_d2);
}

TEST_CASE("eval_phase examples") {
  Vec a0 = Vec::Zero(2);
  const auto q0 = hconv::PhaseSpec::quadratic(a0);
  Vec w(4);
  w << 0.3, -1.0, 2.0, 0.5;
  CHECK(hconv::eval_phase(q0, w) == 0.0);
  CHECK(hconv::eval_phase(hconv::PhaseSpec::quadratic(Vec::Constant(1, 2.0)), vec2(1, 1)) == 4.0);
  CHECK(hconv::eval_phase(hconv::PhaseSpec::power(2), vec2(1, 1)) == 4.0);
  CHECK_THROWS_AS(hconv::eval_phase(q0, vec2(1, 1)), hconv::DimensionError);
}

TEST_CASE("uniform quadratic phase equals c |w|^2") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    const double c = g(rng);
    Vec w(2 * n);
    for (auto& v : w) v = g(rng);
    const auto p = hconv::PhaseSpec::quadratic(Vec::Constant(n, c));
    CHECK(hconv::eval_phase(p, w) == doctest::Approx(c * w.squaredNorm()).epsilon(1e-13));
  }
}

TEST_CASE("phase gradient matches central differences") {
  Vec a(2);
  a << 1.5, -0.5;
  const auto quad = hconv::PhaseSpec::quadratic(a);
  const auto pow3 = hconv::PhaseSpec::power(3);
  Vec w(4);
  w << 0.3, -0.8, 0.6, 0.2;
  for (const auto* p : {&quad, &pow3}) {
    const Vec g = hconv::phase_gradient(*p, w);
    for (int i = 0; i < 4; ++i) {
      Vec wp = w, wm = w;
      wp[i] += 1e-6;
      wm[i] -= 1e-6;
      const double fd = (hconv::eval_phase(*p, wp) - hconv::eval_phase(*p, wm)) / 2e-6;
      CHECK(g[i] == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("eval_density support and product structure") {
  const auto gm1 = hconv::GraphMeasure::quadratic(Vec::Constant(1, 1.0));
  CHECK(hconv::eval_density(gm1, vec2(0, 0)) == 1.0);
  CHECK(hconv::eval_density(gm1, vec2(1.2, 0.9)) == 0.0);

  const auto gm2 = hconv::GraphMeasure::quadratic(Vec::Constant(2, 1.0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const hconv::CutoffSpec c;
  for (int trial = 0; trial < 200; ++trial) {
    Vec w(4);
    for (auto& v : w) v = u(rng);
    const double f1 = hconv::eval_bump(c, w[0] * w[0] + w[2] * w[2]);
    const double f2 = hconv::eval_bump(c, w[1] * w[1] + w[3] * w[3]);
    CHECK(hconv::eval_density(gm2, w) == doctest::Approx(f1 * f2));
    // Forcing the second factor onto its plateau leaves the first.
    Vec w1 = w;
    w1[1] = w1[3] = 0.0;
    CHECK(hconv::eval_density(gm2, w1) == doctest::Approx(f1));
  }
  const auto gmp = hconv::GraphMeasure::power(2, 2);
  Vec w(4);
  w << 0.5, 0.5, 0.5, 0.5;
  CHECK(hconv::eval_density(gmp, w) == 1.0);
  w *= 1.5;
  CHECK(hconv::eval_density(gmp, w) == 0.0);
}

TEST_CASE("total mass for n = 1 against a radial oracle") {
  const auto gm = hconv::GraphMeasure::quadratic(Vec::Constant(1, 1.0));
  const hconv::CutoffSpec c;
  // In polar coordinates the mass is pi * integral_0^2 eta(u) du = 3 pi.
  const auto radial = hconv::integrate([&](double u) { return hconv::eval_bump(c, u); }, 0.0, 2.0);
  CHECK(radial.value == doctest::Approx(1.5).epsilon(1e-10));
  const double polar_mass = std::numbers::pi * radial.value;
  // Two-dimensional product quadrature over the support square.
  const auto& gl = hconv::GaussLegendre::get(48);
  double mass = 0.0;
  const double r = std::sqrt(2.0);
  const int panels = 16;
  for (int pi = 0; pi < panels; ++pi) {
    for (int pj = 0; pj < panels; ++pj) {
      const double ax = -r + 2 * r * pi / panels, ay = -r + 2 * r * pj / panels, h = 2 * r / panels;
      for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
          const double x = ax + 0.5 * h * (gl.nodes[i] + 1), y = ay + 0.5 * h * (gl.nodes[j] + 1);
          mass += 0.25 * h * h * gl.weights[i] * gl.weights[j] * hconv::eval_density(gm, vec2(x, y));
        }
      }
    }
  }
  CHECK(mass > std::numbers::pi);
  CHECK(mass < 4 * std::numbers::pi);
  CHECK(mass == doctest::Approx(polar_mass).epsilon(1e-5));
  CHECK(polar_mass == doctest::Approx(1.5 * std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("phase_gradient_sup for the unit quadratic phase") {
  const auto gm = hconv::GraphMeasure::quadratic(Vec::Constant(1, 1.0));
  // |grad| = 2|w| with |w|^2 < 2 on the support.
  const double s = hconv::phase_gradient_sup(gm, 81);
  CHECK(s > 2.0);
  CHECK(s <= 2.0 * std::sqrt(2.0) + 1e-12);
}

TEST_CASE("bump transform at zero and symmetry") {
  const auto& b = hconv::BumpTransform::shared();
  CHECK(b.value(0.0) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(b.value(2.3) == doctest::Approx(b.value(-2.3)).epsilon(1e-14));
  for (double xi : {0.0, 0.5, 3.0, 17.0}) {
    const double fd = (b.value(xi + 1e-5) - b.value(xi - 1e-5)) / 2e-5;
    CHECK(b.derivative(xi) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("bump_hat_l1 is finite, dilation invariant and converging") {
  const auto base = hconv::bump_hat_l1({});
  CHECK(std::isfinite(base.value));
  CHECK(base.value > 3.0);  // >= |eta^(0)| * width scale, certainly positive
  CHECK(base.value == doctest::Approx(10.13).epsilon(2e-3));
  const hconv::CutoffSpec c;
  for (double lam : {0.5, 2.0}) {
    const auto scaled = hconv::fourier_l1_norm_even([&](double t) { return hconv::eval_bump(c, t / lam); }, 2.0 * lam,
                                                    150.0 / lam, 0.02 / lam);
    CHECK(scaled.value == doctest::Approx(base.value).epsilon(1e-4));
  }
  const auto coarse = hconv::bump_hat_l1({1});
  const auto fine = hconv::bump_hat_l1({3});
  CHECK(fine.error < coarse.error);
  CHECK(fine.value == doctest::Approx(base.value).epsilon(1e-6));
}
