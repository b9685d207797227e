#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hconv/convolve.hpp"
#include "hconv/field_io.hpp"
#include "hconv/quadrature.hpp"

using hconv::Grid;
using hconv::QuadratureSpec;
using Field = hconv::SampledField<double>;

namespace {

const double kMass = 1.5 * std::numbers::pi;  // integral of eta for n = 1

hconv::GraphMeasure quad1() { return hconv::GraphMeasure::quadratic(Eigen::VectorXd::Constant(1, 1.0)); }

double gauss_f(const double* p) { return std::exp(-(p[0] * p[0] + p[1] * p[1]) - 0.5 * p[2] * p[2]); }

double gauss_g(const double* p) {
  return std::exp(-0.7 * ((p[0] - 0.5) * (p[0] - 0.5) + p[1] * p[1]) - 0.3 * (p[2] - 1.0) * (p[2] - 1.0));
}

struct Gaps {
  double duality;
  double commutation;
};

Gaps gaps(int px, int nodes) {
  const auto gm = quad1();
  const Grid g = Grid::reference(px, 2 * px);
  const Field f = Field::from_function(g, gauss_f);
  const Field h = Field::from_function(g, gauss_g);
  const QuadratureSpec q{nodes};
  const Field tf = hconv::apply_Tnu(f, gm, q);
  const double a = hconv::inner_product(tf, h);
  const double b = hconv::inner_product(f, hconv::apply_adjoint(h, gm, q));
  const hconv::HPoint<double> shift(Eigen::Vector2d(0.37, -0.21), 0.43);
  const Field lhs = hconv::translate(tf, shift);
  const Field rhs = hconv::apply_Tnu(hconv::translate(f, shift), gm, q);
  return {std::abs(a - b) / std::abs(a), (lhs.values - rhs.values).norm() / tf.values.norm()};
}

}  // namespace

TEST_CASE("Grid geometry and validation") {
  const Grid g = Grid::reference(8, 16);
  CHECK(g.dims() == 3);
  CHECK(g.size() == 8 * 8 * 16);
  CHECK(g.spacing(0) == 1.0);
  CHECK(g.spacing(2) == 1.0);
  CHECK(g.cell_volume() == 1.0);
  CHECK(g.coordinate(0, 0) == -3.5);
  int idx[3];
  g.unflatten(17, idx);
  CHECK(idx[0] == 0);
  CHECK(idx[1] == 1);
  CHECK(idx[2] == 1);
  double p[3];
  g.point(17, p);
  CHECK(p[1] == -2.5);
  CHECK(p[2] == -6.5);
  CHECK_THROWS_AS(Grid::box(1, 1.0, 1.0, 0, 4), hconv::DomainError);
  CHECK_THROWS_AS(Grid::box(0, 1.0, 1.0, 4, 4), hconv::DimensionError);
  CHECK_THROWS_AS(Grid::box(1, 1.0, 1.0, 2048, 2048), hconv::ResolutionError);
}

TEST_CASE("SampledField construction checks") {
  const Grid g = Grid::reference(4, 4);
  CHECK_THROWS_AS(Field(g, Eigen::VectorXd::Zero(3)), hconv::DimensionError);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
  bad[2] = std::nan("");
  CHECK_THROWS_AS(Field(g, bad), hconv::DomainError);
}

TEST_CASE("interpolation reproduces polynomials and extends by zero") {
  const Grid g = Grid::box(1, 2.0, 2.0, 16, 16);
  const Field lin = Field::from_function(g, [](const double* p) { return 1.0 + 2.0 * p[0] - p[1] + 0.5 * p[2]; });
  const Field cub = Field::from_function(g, [](const double* p) { return p[0] * p[0] * p[0] - p[1] * p[2] * p[2]; });
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const double p[3] = {u(rng), u(rng), u(rng)};
    CHECK(lin.sample(p, 1) == doctest::Approx(1.0 + 2.0 * p[0] - p[1] + 0.5 * p[2]).epsilon(1e-13));
    CHECK(std::abs(cub.sample(p, 3) - (p[0] * p[0] * p[0] - p[1] * p[2] * p[2])) < 1e-12);
  }
  const double far[3] = {5.0, 0.0, 0.0};
  CHECK(lin.sample(far, 1) == 0.0);
  CHECK(cub.sample(far, 3) == 0.0);
  double node[3];
  g.point(123, node);
  CHECK(lin.sample(node, 1) == lin.values[123]);
}

TEST_CASE("measure nodes integrate eta") {
  const auto gm = quad1();
  CHECK(hconv::measure_nodes(gm, QuadratureSpec{16}).weight.sum() == doctest::Approx(kMass).epsilon(1e-6));
  QuadratureSpec prod{32};
  prod.rule = QuadratureSpec::Rule::product;
  CHECK(hconv::measure_nodes(gm, prod).weight.sum() == doctest::Approx(kMass).epsilon(1e-3));

  Eigen::VectorXd a(2);
  a << 1.0, -0.5;
  const auto gm2 = hconv::GraphMeasure::quadratic(a);
  CHECK(hconv::measure_nodes(gm2, QuadratureSpec{12}).weight.sum() == doctest::Approx(kMass * kMass).epsilon(1e-5));

  // integral over R^4 of eta_0(|w|^2) = pi^2 integral eta_0(u) u du
  const auto gp = hconv::GraphMeasure::power(2, 2);
  const double bp[] = {0.0, 1.0, 2.0};
  const double radial =
      hconv::integrate([](double v) { return hconv::eval_bump({}, v) * v; }, std::span<const double>(bp)).value;
  CHECK(hconv::measure_nodes(gp, QuadratureSpec{12}).weight.sum() ==
        doctest::Approx(std::numbers::pi * std::numbers::pi * radial).epsilon(1e-3));

  CHECK_THROWS_AS(hconv::measure_nodes(gm, QuadratureSpec{3}), hconv::DomainError);
  CHECK_THROWS_AS(hconv::measure_nodes(gm, QuadratureSpec{8, 1, 2}), hconv::DomainError);
}

TEST_CASE("constant input gives the total mass at interior points") {
  const auto gm = quad1();
  const Grid g = Grid::reference(16, 32);
  const Field one(g, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size())));
  const QuadratureSpec q{8};
  hconv::ConvolveDiagnostics diag;
  const Field t1 = hconv::apply_Tnu(one, gm, q, 1, &diag);
  const Field s1 = hconv::apply_adjoint(one, gm, q);
  const double total = hconv::measure_nodes(gm, q).weight.sum();
  double p[3];
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.point(i, p);
    if (std::hypot(p[0], p[1]) <= 1.5 && std::abs(p[2]) <= 3.0) {
      CHECK(t1.values[static_cast<Eigen::Index>(i)] == doctest::Approx(total).epsilon(1e-12));
      CHECK(s1.values[static_cast<Eigen::Index>(i)] == doctest::Approx(total).epsilon(1e-12));
    }
  }
  CHECK(total == doctest::Approx(kMass).epsilon(2e-4));
  CHECK(diag.outside_fraction > 0.0);
  CHECK(diag.outside_fraction < 0.5);
}

TEST_CASE("grid operator matches the group-law formula with exact input") {
  // The pull-back point (x, t) . (w, phi(w))^{-1} is formed with group_mul here.
  const auto gm = quad1();
  const Grid g = Grid::reference(32, 64);
  const Field f = Field::from_function(g, gauss_f);
  const auto nodes = hconv::measure_nodes(gm, QuadratureSpec{8});
  for (auto [x0, x1, t] : {std::array<double, 3>{0.2, -0.4, 0.5}, {1.0, 0.7, -1.2}, {-0.6, 0.0, 2.0}}) {
    const hconv::HPoint<double> xt(Eigen::Vector2d(x0, x1), t);
    double exact = 0.0;
    for (Eigen::Index k = 0; k < nodes.count(); ++k) {
      const hconv::HPoint<double> wp(nodes.w.col(k), nodes.phi[k]);
      const auto q = hconv::group_mul(xt, hconv::group_inv(wp));
      const double p[3] = {q.x[0], q.x[1], q.t};
      exact += nodes.weight[k] * gauss_f(p);
    }
    const double x[2] = {x0, x1};
    CHECK(hconv::Tnu_at(f, nodes, x, t, 1) == doctest::Approx(exact).epsilon(2e-2));
    CHECK(hconv::Tnu_at(f, nodes, x, t, 3) == doctest::Approx(exact).epsilon(2e-3));
  }
}

TEST_CASE("zero, linearity and positivity") {
  const auto gm = quad1();
  const Grid g = Grid::reference(12, 24);
  const QuadratureSpec q{8};
  const Field zero(g);
  CHECK(hconv::apply_Tnu(zero, gm, q).values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(hconv::apply_adjoint(zero, gm, q).values.cwiseAbs().maxCoeff() == 0.0);

  const Field f = Field::from_function(g, gauss_f);
  const Field h = Field::from_function(g, gauss_g);
  const Field combo(g, 2.0 * f.values - 3.0 * h.values);
  const Eigen::VectorXd lhs = hconv::apply_Tnu(combo, gm, q).values;
  const Eigen::VectorXd rhs = 2.0 * hconv::apply_Tnu(f, gm, q).values - 3.0 * hconv::apply_Tnu(h, gm, q).values;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-13 * rhs.cwiseAbs().maxCoeff());

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (auto& x : v) x = u(rng);
  const Field r(g, v);
  CHECK(hconv::apply_Tnu(r, gm, q, 1).values.minCoeff() >= 0.0);
  CHECK(hconv::apply_Tnu(r, gm, QuadratureSpec{8, 1, 3}).values.minCoeff() >= -1e-2);
}

TEST_CASE("results do not depend on the worker count") {
  const auto gm = quad1();
  const Grid g = Grid::reference(12, 24);
  const Field f = Field::from_function(g, gauss_f);
  const QuadratureSpec q{8};
  const auto a = hconv::apply_Tnu(f, gm, q, 1);
  const auto b = hconv::apply_Tnu(f, gm, q, 3);
  CHECK((a.values.array() == b.values.array()).all());
}

TEST_CASE("complex fields split into real and imaginary parts") {
  using CField = hconv::SampledField<std::complex<double>>;
  const auto gm = quad1();
  const Grid g = Grid::reference(10, 20);
  const Field re = Field::from_function(g, gauss_f);
  const Field im = Field::from_function(g, gauss_g);
  const CField c(g, re.values.cast<std::complex<double>>() + std::complex<double>(0, 1) * im.values);
  const QuadratureSpec q{8};
  const auto tc = hconv::apply_Tnu(c, gm, q);
  const auto tr = hconv::apply_Tnu(re, gm, q);
  const auto ti = hconv::apply_Tnu(im, gm, q);
  CHECK((tc.values.real() - tr.values).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((tc.values.imag() - ti.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("doubling w-nodes changes T f by under 0.1 percent") {
  const auto gm = quad1();
  const Field f = Field::from_function(Grid::reference(32, 64), gauss_f);
  const auto a = hconv::apply_Tnu(f, gm, QuadratureSpec{8});
  const auto b = hconv::apply_Tnu(f, gm, QuadratureSpec{16});
  CHECK((a.values - b.values).norm() / b.values.norm() <= 1e-3);
}

TEST_CASE("duality and commutation gaps shrink under refinement") {
  const Gaps coarse = gaps(16, 6);
  const Gaps fine = gaps(24, 8);
  CHECK(fine.duality < coarse.duality);
  CHECK(fine.commutation < coarse.commutation);
  CHECK(fine.duality <= 1e-3);
}

TEST_CASE("translate identity and grid-aligned central shift") {
  const Grid g = Grid::reference(8, 32);
  const Field f = Field::from_function(g, gauss_f);
  const auto same = hconv::translate(f, hconv::HPoint<double>::identity(1));
  CHECK((same.values - f.values).cwiseAbs().maxCoeff() == 0.0);

  const double ht = g.spacing(2);
  const auto moved = hconv::translate(f, hconv::HPoint<double>(Eigen::Vector2d::Zero(), 3.0 * ht));
  int idx[3];
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.unflatten(i, idx);
    const double expected = idx[2] >= 3 ? f.values[static_cast<Eigen::Index>(i - 3)] : 0.0;
    worst = std::max(worst, std::abs(moved.values[static_cast<Eigen::Index>(i)] - expected));
  }
  CHECK(worst < 1e-14);
  CHECK_THROWS_AS(hconv::translate(f, hconv::HPoint<double>::identity(2)), hconv::DimensionError);
}

TEST_CASE("lp_norm") {
  const Grid g = Grid::box(1, 1.0, 1.0, 4, 4);
  Field chi(g);
  for (int i : {0, 5, 17, 40}) chi.values[i] = 1.0;
  CHECK(hconv::lp_norm(chi, 1.0) == doctest::Approx(4.0 * g.cell_volume()));
  CHECK(hconv::lp_norm(chi, 2.0) == doctest::Approx(std::sqrt(4.0 * g.cell_volume())));
  CHECK(hconv::lp_norm(chi, std::numeric_limits<double>::infinity()) == 1.0);
  CHECK_THROWS_AS(hconv::lp_norm(chi, 0.5), hconv::DomainError);
}

TEST_CASE("field round trip through disk") {
  const auto dir = std::filesystem::temp_directory_path() / "hconv_field_io_test";
  std::filesystem::create_directories(dir);
  const Grid g = Grid::box(1, 1.5, 2.0, 5, 7);
  const Field f = Field::from_function(g, gauss_g);
  hconv::write_field(f, dir / "f");
  const Field back = hconv::read_field(dir / "f");
  CHECK(back.grid == g);
  CHECK((back.values.array() == f.values.array()).all());
  CHECK(std::filesystem::file_size(dir / "f.bin") == 8 * g.size());
  {
    std::ofstream trunc(dir / "f.bin", std::ios::binary | std::ios::trunc);
    trunc << "short";
  }
  CHECK_THROWS_AS(hconv::read_field(dir / "f"), hconv::IoError);
  CHECK_THROWS_AS(hconv::read_field(dir / "missing"), hconv::IoError);
  std::filesystem::remove_all(dir);
}
