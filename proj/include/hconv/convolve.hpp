#pragma once

// Grid-sampled functions on a box in R^{2n} x R and the operators
//   T f(x, t)  = integral f((x, t) . (w, phi(w))^{-1}) eta(w) dw
//   T* g(x, t) = integral g((x, t) . (y, phi(y))) eta(y) dy
// by product Gauss-Legendre quadrature over supp(eta), with off-grid reads by
// multilinear or cubic Lagrange interpolation and zero extension.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "hconv/errors.hpp"
#include "hconv/hgroup.hpp"
#include "hconv/measures.hpp"
#include "hconv/parallel.hpp"

namespace hconv {

/// Cell-centred tensor grid on the box [lo, hi] of R^{2n+1}; the last axis is t.
/// Values are stored row-major (t fastest).
struct Grid {
  int n = 1;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<int> points;

  /// Symmetric box [-half_x, half_x]^{2n} x [-half_t, half_t].
  static Grid box(int n, double half_x, double half_t, int points_x, int points_t);
  /// Reference n = 1 box [-4, 4]^2 x [-8, 8].
  static Grid reference(int points_x = 32, int points_t = 64);

  int dims() const { return 2 * n + 1; }
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / points[axis]; }
  double coordinate(int axis, int i) const { return lo[axis] + (i + 0.5) * spacing(axis); }
  double cell_volume() const;
  std::size_t size() const;
  /// Multi-index of a flat index.
  void unflatten(std::size_t flat, int* index) const;
  /// Coordinates of the point with flat index `flat` (length 2n+1).
  void point(std::size_t flat, double* out) const;

  void validate(std::size_t max_points = std::size_t{1} << 27) const;

  bool operator==(const Grid& other) const;
};

namespace detail {

inline void cubic_weights(double frac, double* w) {
  // Lagrange basis on nodes -1, 0, 1, 2.
  const double a = frac;
  w[0] = -a * (a - 1.0) * (a - 2.0) / 6.0;
  w[1] = (a + 1.0) * (a - 1.0) * (a - 2.0) / 2.0;
  w[2] = -(a + 1.0) * a * (a - 2.0) / 2.0;
  w[3] = (a + 1.0) * a * (a - 1.0) / 6.0;
}

}  // namespace detail

template <typename Scalar = double>
struct SampledField {
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Grid grid;
  Values values;

  SampledField() = default;
  explicit SampledField(Grid g) : grid(std::move(g)) {
    grid.validate();
    values = Values::Zero(static_cast<Eigen::Index>(grid.size()));
  }
  SampledField(Grid g, Values v) : grid(std::move(g)), values(std::move(v)) {
    grid.validate();
    if (static_cast<std::size_t>(values.size()) != grid.size()) {
      throw DimensionError("SampledField: value count does not match the grid");
    }
    if (!values.allFinite()) throw DomainError("SampledField: values must be finite");
  }

  /// Samples f(point) at every grid point.
  template <typename F>
  static SampledField from_function(const Grid& g, F&& f) {
    SampledField out(g);
    std::vector<double> p(g.dims());
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.point(i, p.data());
      out.values[static_cast<Eigen::Index>(i)] = f(p.data());
    }
    return out;
  }

  /// Interpolated value at `p` (length 2n+1); zero outside the sampled box.
  Scalar sample(const double* p, int order = 1) const {
    const int d = grid.dims();
    const int taps = order == 3 ? 4 : 2;
    std::array<int, 9> base{};
    std::array<std::array<double, 4>, 9> w{};
    bool interior = true;
    for (int a = 0; a < d; ++a) {
      const double u = (p[a] - grid.lo[a]) / grid.spacing(a) - 0.5;
      const double reach = taps == 4 ? 2.0 : 1.0;
      if (!(u > -reach) || !(u < grid.points[a] - 1 + reach)) return Scalar(0);
      const double fl = std::floor(u);
      const double frac = u - fl;
      if (taps == 2) {
        base[a] = static_cast<int>(fl);
        w[a][0] = 1.0 - frac;
        w[a][1] = frac;
      } else {
        base[a] = static_cast<int>(fl) - 1;
        detail::cubic_weights(frac, w[a].data());
      }
      interior = interior && base[a] >= 0 && base[a] + taps <= grid.points[a];
    }
    if (interior && taps == 2 && d == 3) return trilinear(base, w);
    Scalar acc(0);
    int corners = 1;
    for (int a = 0; a < d; ++a) corners *= taps;
    for (int c = 0; c < corners; ++c) {
      int code = c;
      double weight = 1.0;
      std::size_t flat = 0;
      bool inside = true;
      for (int a = 0; a < d; ++a) {
        const int off = code % taps;
        code /= taps;
        const int idx = base[a] + off;
        if (idx < 0 || idx >= grid.points[a]) {
          inside = false;
          break;
        }
        weight *= w[a][off];
        flat = flat * static_cast<std::size_t>(grid.points[a]) + static_cast<std::size_t>(idx);
      }
      if (inside && weight != 0.0) acc += weight * values[static_cast<Eigen::Index>(flat)];
    }
    return acc;
  }

 private:
  Scalar trilinear(const std::array<int, 9>& base, const std::array<std::array<double, 4>, 9>& w) const {
    const std::size_t s1 = static_cast<std::size_t>(grid.points[2]);
    const std::size_t s0 = s1 * static_cast<std::size_t>(grid.points[1]);
    const Scalar* v = values.data() + base[0] * s0 + base[1] * s1 + base[2];
    const Scalar c00 = w[2][0] * v[0] + w[2][1] * v[1];
    const Scalar c01 = w[2][0] * v[s1] + w[2][1] * v[s1 + 1];
    const Scalar c10 = w[2][0] * v[s0] + w[2][1] * v[s0 + 1];
    const Scalar c11 = w[2][0] * v[s0 + s1] + w[2][1] * v[s0 + s1 + 1];
    return w[0][0] * (w[1][0] * c00 + w[1][1] * c01) + w[0][1] * (w[1][0] * c10 + w[1][1] * c11);
  }
};

/// Rule for the w-integral over supp(eta).
///   polar:   per conjugate pair (w_j, w_{n+j}), Gauss-Legendre in r on [0, 1]
///            and on [1, sqrt 2] (split into `panels`) times the trapezoid rule
///            in the angle with 2 * nodes_per_axis points
///   product: Gauss-Legendre on every axis of [-sqrt 2, sqrt 2]^{2n}
struct QuadratureSpec {
  enum class Rule { polar, product };

  int nodes_per_axis = 16;  // per panel
  int panels = 1;
  int interp_order = 1;  // 1 multilinear, 3 cubic
  Rule rule = Rule::polar;

  void validate() const {
    if (nodes_per_axis < 1 || panels < 1) throw DomainError("QuadratureSpec: counts must be positive");
    // polar: radial nodes (1 + panels) * nodes, angular 2 * nodes
    const int per_axis = rule == Rule::polar ? std::min((1 + panels) * nodes_per_axis, 2 * nodes_per_axis)
                                             : nodes_per_axis * panels;
    if (per_axis < 8) throw DomainError("QuadratureSpec: need at least 8 nodes per axis");
    if (interp_order != 1 && interp_order != 3) throw DomainError("QuadratureSpec: interpolation order must be 1 or 3");
  }
};

/// Quadrature nodes w_k (columns), weights eta(w_k) * rule weight, and phi(w_k).
/// Nodes with eta = 0 are dropped.
struct MeasureNodes {
  int n = 1;
  Eigen::MatrixXd w;
  Eigen::VectorXd weight;
  Eigen::VectorXd phi;

  Eigen::Index count() const { return weight.size(); }
};

/// Nodes for the whole of supp(eta) using q.rule.
MeasureNodes measure_nodes(const GraphMeasure& gm, const QuadratureSpec& q);
/// Product-rule nodes over [lo, hi] intersected with [-sqrt 2, sqrt 2]^{2n}.
MeasureNodes measure_nodes(const GraphMeasure& gm, const QuadratureSpec& q, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi);

struct ConvolveDiagnostics {
  double outside_fraction = 0.0;  // share of interpolation reads outside the box
};

namespace detail {

template <typename Scalar, bool Adjoint>
Scalar apply_at(const SampledField<Scalar>& f, const MeasureNodes& nodes, const double* x, double t, int order,
                std::size_t* outside) {
  const int n = nodes.n;
  const int d = 2 * n + 1;
  std::array<double, 9> p{};
  Scalar acc(0);
  for (Eigen::Index k = 0; k < nodes.count(); ++k) {
    const auto w = nodes.w.col(k);
    double twist = 0.0;  // W(x, w)
    for (int j = 0; j < n; ++j) twist += x[j] * w[n + j] - w[j] * x[n + j];
    if constexpr (Adjoint) {
      for (int a = 0; a < 2 * n; ++a) p[a] = x[a] + w[a];
      p[2 * n] = t + nodes.phi[k] + 0.5 * twist;
    } else {
      for (int a = 0; a < 2 * n; ++a) p[a] = x[a] - w[a];
      p[2 * n] = t - nodes.phi[k] - 0.5 * twist;
    }
    if (outside) {
      for (int a = 0; a < d; ++a) {
        if (p[a] < f.grid.lo[a] || p[a] > f.grid.hi[a]) {
          ++*outside;
          break;
        }
      }
    }
    acc += nodes.weight[k] * f.sample(p.data(), order);
  }
  return acc;
}

template <typename Scalar, bool Adjoint>
SampledField<Scalar> apply_all(const SampledField<Scalar>& f, const MeasureNodes& nodes, int order, int workers,
                               ConvolveDiagnostics* diag) {
  if (f.grid.n != nodes.n) throw DimensionError("apply: measure and grid dimensions differ");
  SampledField<Scalar> out(f.grid);
  const std::size_t total = f.grid.size();
  const int chunks = std::max(1, workers);
  std::vector<std::size_t> outside(static_cast<std::size_t>(chunks) + 1, 0);
  const std::size_t per = (total + chunks - 1) / chunks;
  parallel_for(static_cast<std::size_t>(chunks), workers, [&](std::size_t cb, std::size_t ce) {
    std::array<double, 9> p{};
    for (std::size_t c = cb; c < ce; ++c) {
      for (std::size_t i = c * per; i < std::min(total, (c + 1) * per); ++i) {
        f.grid.point(i, p.data());
        out.values[static_cast<Eigen::Index>(i)] = apply_at<Scalar, Adjoint>(
            f, nodes, p.data(), p[2 * nodes.n], order, diag ? &outside[c] : nullptr);
      }
    }
  });
  if (diag) {
    std::size_t sum = 0;
    for (auto v : outside) sum += v;
    diag->outside_fraction =
        static_cast<double>(sum) / (static_cast<double>(total) * std::max<Eigen::Index>(1, nodes.count()));
  }
  return out;
}

}  // namespace detail

/// T_nu f on the grid of f.
template <typename Scalar>
SampledField<Scalar> apply_Tnu(const SampledField<Scalar>& f, const GraphMeasure& gm, const QuadratureSpec& q,
                               int workers = 1, ConvolveDiagnostics* diag = nullptr) {
  q.validate();
  return detail::apply_all<Scalar, false>(f, measure_nodes(gm, q), q.interp_order, workers, diag);
}

/// T*_nu g on the grid of g.
template <typename Scalar>
SampledField<Scalar> apply_adjoint(const SampledField<Scalar>& g, const GraphMeasure& gm, const QuadratureSpec& q,
                                   int workers = 1, ConvolveDiagnostics* diag = nullptr) {
  q.validate();
  return detail::apply_all<Scalar, true>(g, measure_nodes(gm, q), q.interp_order, workers, diag);
}

/// Pointwise T_nu f(x, t) and T*_nu f(x, t) with caller-supplied nodes.
template <typename Scalar>
Scalar Tnu_at(const SampledField<Scalar>& f, const MeasureNodes& nodes, const double* x, double t, int order = 1) {
  return detail::apply_at<Scalar, false>(f, nodes, x, t, order, nullptr);
}
template <typename Scalar>
Scalar adjoint_at(const SampledField<Scalar>& f, const MeasureNodes& nodes, const double* x, double t, int order = 1) {
  return detail::apply_at<Scalar, true>(f, nodes, x, t, order, nullptr);
}

/// Riemann-sum L^p norm; p = infinity gives max |f|.
template <typename Scalar>
double lp_norm(const SampledField<Scalar>& f, double p) {
  if (std::isinf(p)) return f.values.size() ? static_cast<double>(f.values.cwiseAbs().maxCoeff()) : 0.0;
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < f.values.size(); ++i) sum += std::pow(std::abs(f.values[i]), p);
  return std::pow(sum * f.grid.cell_volume(), 1.0 / p);
}

/// Riemann-sum pairing sum f conj(g) dV.
template <typename Scalar>
Scalar inner_product(const SampledField<Scalar>& f, const SampledField<Scalar>& g) {
  if (!(f.grid == g.grid)) throw DimensionError("inner_product: grids differ");
  Scalar sum(0);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
      sum += f.values[i] * std::conj(g.values[i]);
    } else {
      sum += f.values[i] * g.values[i];
    }
  }
  return sum * f.grid.cell_volume();
}

/// Left translation (tau_g f)(x, t) = f(g^{-1} . (x, t)) = f(x - y, t - s - W(y, x)/2).
template <typename Scalar>
SampledField<Scalar> translate(const SampledField<Scalar>& f, const HPoint<double>& g, int order = 1) {
  if (g.dim() != f.grid.n) throw DimensionError("translate: dimension mismatch");
  const int n = f.grid.n;
  SampledField<Scalar> out(f.grid);
  std::array<double, 9> p{}, q{};
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    f.grid.point(i, p.data());
    double twist = 0.0;  // W(y, x)
    for (int j = 0; j < n; ++j) twist += g.x[j] * p[n + j] - p[j] * g.x[n + j];
    for (int a = 0; a < 2 * n; ++a) q[a] = p[a] - g.x[a];
    q[2 * n] = p[2 * n] - g.t - 0.5 * twist;
    out.values[static_cast<Eigen::Index>(i)] = f.sample(q.data(), order);
  }
  return out;
}

}  // namespace hconv
