#include "hconv/typeset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hconv/parallel.hpp"

namespace hconv {

namespace {

// Volume of the unit ball in R^{2n}.
double unit_ball_volume(int n) { return std::pow(std::numbers::pi, n) / std::tgamma(n + 1.0); }

// (sum w |v|^{1/iq})^{iq}, or max |v| when iq = 0.
double weighted_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w, double iq) {
  if (iq == 0.0) return v.cwiseAbs().maxCoeff();
  const double q = 1.0 / iq;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += w[i] * std::pow(std::abs(v[i]), q);
  return std::pow(sum, iq);
}

double grid_norm(const Eigen::VectorXd& v, double vol, double p) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += std::pow(std::abs(v[i]), p);
  return std::pow(sum * vol, 1.0 / p);
}

// sgn(v) |v|^{e}
Eigen::VectorXd duality_map(const Eigen::VectorXd& v, double e) {
  return v.unaryExpr([e](double x) { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), e), x); });
}

std::vector<Eigen::VectorXd> ball_lattice(int n, int per_axis) {
  const int d = 2 * n;
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(per_axis);
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd x(d);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t code = c;
    for (int a = d - 1; a >= 0; --a) {
      x[a] = -1.0 + (static_cast<double>(code % per_axis) + 0.5) * 2.0 / per_axis;
      code /= per_axis;
    }
    if (x.squaredNorm() <= 1.0) out.push_back(x);
  }
  return out;
}

}  // namespace

void TypePoint::validate() const {
  if (!(ip >= 0.0 && ip <= 1.0 && iq >= 0.0 && iq <= 1.0)) {
    throw DomainError("TypePoint: coordinates must lie in [0, 1]");
  }
}

double Triangle::signed_area() const {
  return 0.5 * ((b.ip - a.ip) * (c.iq - a.iq) - (c.ip - a.ip) * (b.iq - a.iq));
}

void Triangle::validate() const {
  a.validate();
  b.validate();
  c.validate();
  if (!(std::abs(signed_area()) > 0.0)) throw DomainError("Triangle: vertices are collinear");
}

Triangle thm1_triangle(int n) {
  if (n < 1) throw DomainError("thm1_triangle: n must be >= 1");
  return {{0.0, 0.0}, {1.0, 1.0}, {(2.0 * n + 1.0) / (2.0 * n + 2.0), 1.0 / (2.0 * n + 2.0)}};
}

TypePoint thm2_vertex(int n, int m) {
  if (n < 2 || m < 2) throw DomainError("thm2_vertex: requires n, m >= 2");
  const double d = 2.0 * (1.0 + m * n);
  return {(d - m) / d, m / d};
}

Triangle thm2_triangle(int n, int m) { return {{0.0, 0.0}, {1.0, 1.0}, thm2_vertex(n, m)}; }

bool contains(const Triangle& tri, const TypePoint& pt, double tol) {
  const double area = tri.signed_area();
  if (area == 0.0) throw DomainError("contains: degenerate triangle");
  auto edge = [&](const TypePoint& u, const TypePoint& v) {
    return 0.5 * ((v.ip - u.ip) * (pt.iq - u.iq) - (pt.ip - u.ip) * (v.iq - u.iq)) / area;
  };
  return edge(tri.b, tri.c) >= -tol && edge(tri.c, tri.a) >= -tol && edge(tri.a, tri.b) >= -tol;
}

double predicted_exponent(int n, const TypePoint& pt) { return 2.0 * n + pt.iq - (2.0 * n + 1.0) * pt.ip; }

TypePoint dual_point(const TypePoint& pt) { return {1.0 - pt.iq, 1.0 - pt.ip}; }

double predicted_dual_exponent(int n, const TypePoint& pt) { return predicted_exponent(n, dual_point(pt)); }

ScalingLadder ScalingLadder::geometric(double first, int count, double base_spacing, int cells_per_delta) {
  if (count < 2) throw DomainError("ScalingLadder: need at least two deltas");
  if (!(base_spacing > 0.0) || cells_per_delta < 1) throw DomainError("ScalingLadder: bad spacing");
  ScalingLadder l;
  double d = first;
  for (int i = 0; i < count; ++i, d *= 0.5) {
    l.deltas.push_back(d);
    l.refine.push_back(std::max(1, static_cast<int>(std::ceil(base_spacing * cells_per_delta / d - 1e-9))));
  }
  l.validate();
  return l;
}

void ScalingLadder::validate() const {
  if (deltas.size() < 2) throw DomainError("ScalingLadder: need at least two deltas");
  if (refine.size() != deltas.size()) throw DomainError("ScalingLadder: one refinement factor per delta");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] < 1.0)) throw DomainError("ScalingLadder: deltas must lie in (0, 1)");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw DomainError("ScalingLadder: deltas must strictly decrease");
    if (refine[i] < 1) throw DomainError("ScalingLadder: refinement factors must be >= 1");
  }
}

void ConvolveContext::validate() const {
  grid.validate();
  q.validate();
  if (local_nodes < 8) throw DomainError("ConvolveContext: local_nodes must be >= 8");
  if (x_samples_per_axis < 1) throw DomainError("ConvolveContext: x_samples_per_axis must be >= 1");
  if (t_samples < 4) throw DomainError("ConvolveContext: need at least 4 t-samples");
  if (norm_iterations < 1) throw DomainError("ConvolveContext: norm_iterations must be >= 1");
}

ScalingSamples sample_scaling(const GraphMeasure& gm, const ScalingLadder& ladder, const ConvolveContext& ctx,
                              bool adjoint) {
  gm.validate();
  ladder.validate();
  ctx.validate();
  if (ctx.grid.n != gm.n) throw DimensionError("sample_scaling: grid and measure dimensions differ");
  const int n = gm.n;
  double base = 0.0;
  for (int a = 0; a < ctx.grid.dims(); ++a) base = std::max(base, ctx.grid.spacing(a));

  ScalingSamples out;
  out.n = n;
  out.adjoint = adjoint;
  out.radius_factor = 1.0 / (4.0 * n * (1.0 + phase_gradient_sup(gm)));

  const auto lattice = ball_lattice(n, ctx.x_samples_per_axis);
  if (lattice.empty()) throw ResolutionError("sample_scaling: empty lattice on D");
  const double x_weight = unit_ball_volume(n) / static_cast<double>(lattice.size());
  QuadratureSpec local{ctx.local_nodes, 1, ctx.q.interp_order, QuadratureSpec::Rule::product};

  for (std::size_t level = 0; level < ladder.deltas.size(); ++level) {
    const double delta = ladder.deltas[level];
    const double h = base / ladder.refine[level];
    if (delta / h < 4.0) {
      std::ostringstream msg;
      msg << "sample_scaling: delta = " << delta << " spans only " << delta / h
          << " local cells (need >= 4); raise the refinement factor";
      throw ResolutionError(msg.str());
    }
    // f_delta on a local grid with spacing h covering B(2 delta) plus two cells.
    const int points = static_cast<int>(std::ceil((4.0 * delta + 4.0 * h) / h));
    const double half = 0.5 * points * h;
    const Grid g = Grid::box(n, half, half, points, points);
    const auto f = SampledField<double>::from_function(g, [&](const double* p) {
      double r2 = 0.0;
      for (int a = 0; a < 2 * n + 1; ++a) r2 += p[a] * p[a];
      return r2 <= 4.0 * delta * delta ? 1.0 : 0.0;
    });

    DeltaSamples ds;
    ds.delta = delta;
    ds.spacing = h;
    ds.f_measure = lp_norm(f, 1.0);
    const auto count = static_cast<Eigen::Index>(lattice.size() * ctx.t_samples);
    ds.values.resize(count);
    ds.weights.setConstant(count, x_weight * (0.5 * delta) / ctx.t_samples);

    // y ranges over x - supp f (primary) or -x + supp f (adjoint), inside supp eta.
    const double reach = half;
    parallel_for(lattice.size(), ctx.workers, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const Eigen::VectorXd& x = lattice[i];
        const Eigen::VectorXd centre = adjoint ? Eigen::VectorXd(-x) : x;
        const MeasureNodes nodes = measure_nodes(gm, local, centre.array() - reach, centre.array() + reach);
        const double t0 = adjoint ? -eval_phase(gm.phase, -x) : eval_phase(gm.phase, x);
        for (int j = 0; j < ctx.t_samples; ++j) {
          const double t = t0 + 0.25 * delta * (-1.0 + (2.0 * j + 1.0) / ctx.t_samples);
          const double v = adjoint ? adjoint_at(f, nodes, x.data(), t, ctx.q.interp_order)
                                   : Tnu_at(f, nodes, x.data(), t, ctx.q.interp_order);
          ds.values[static_cast<Eigen::Index>(i * ctx.t_samples + j)] = v;
        }
      }
    });
    ds.infimum = ds.values.minCoeff() / std::pow(delta, 2 * n);
    out.levels.push_back(std::move(ds));
  }
  return out;
}

ExponentFit fit_exponent(const ScalingSamples& s, double ip, double iq) {
  TypePoint{ip, iq}.validate();
  std::vector<double> deltas, ratios;
  for (const auto& level : s.levels) {
    deltas.push_back(level.delta);
    ratios.push_back(weighted_norm(level.values, level.weights, iq) / std::pow(level.f_measure, ip));
  }
  const LinearFit lf = fit_loglog(deltas, ratios);
  ExponentFit out;
  out.exponent = lf.slope;
  out.r2 = lf.r2;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double pred = lf.intercept + lf.slope * std::log(deltas[i]);
    out.max_residual = std::max(out.max_residual, std::abs(std::log(ratios[i]) - pred));
  }
  // A flat power law has no variance to explain, so R^2 alone cannot certify it.
  out.ok = lf.r2 >= 0.98 || out.max_residual <= 0.02;
  out.ratios = std::move(ratios);
  return out;
}

namespace {

void annotate(ScanResult& r, const GraphMeasure& gm) {
  r.inside_thm1 = contains(thm1_triangle(gm.n), r.point);
  if (gm.phase.kind == PhaseSpec::Kind::power && gm.n >= 2 && gm.phase.m >= 2) {
    r.inside_thm2 = contains(thm2_triangle(gm.n, gm.phase.m), r.point);
  }
  r.violates_p_le_q = r.point.ip < r.point.iq;
  r.predicted_primary = predicted_exponent(gm.n, r.point);
  r.predicted_dual = predicted_dual_exponent(gm.n, r.point);
}

void fill_primary(ScanResult& r, const ScalingSamples& s) {
  const auto fit = fit_exponent(s, r.point.ip, r.point.iq);
  r.fitted_primary = fit.exponent;
  r.r2 = fit.r2;
  r.fit_ok = fit.ok;
  r.infimum.clear();
  for (const auto& level : s.levels) r.infimum.push_back(level.infimum);
}

ExponentFit dual_fit(const ScanResult& r, const ScalingSamples& s) {
  const TypePoint d = dual_point(r.point);
  return fit_exponent(s, d.ip, d.iq);
}

}  // namespace

ScanResult scaling_experiment(const TypePoint& pt, const GraphMeasure& gm, const ScalingLadder& ladder,
                              const ConvolveContext& ctx) {
  pt.validate();
  ScanResult r;
  r.point = pt;
  annotate(r, gm);
  fill_primary(r, sample_scaling(gm, ladder, ctx, false));
  r.fitted = r.fitted_primary;
  r.predicted = r.predicted_primary;
  return r;
}

ScanResult dual_scaling_experiment(const TypePoint& pt, const GraphMeasure& gm, const ScalingLadder& ladder,
                                   const ConvolveContext& ctx) {
  pt.validate();
  ScanResult r;
  r.point = pt;
  annotate(r, gm);
  const auto s = sample_scaling(gm, ladder, ctx, true);
  const auto fit = dual_fit(r, s);
  r.fitted_dual = fit.exponent;
  r.r2 = fit.r2;
  r.fit_ok = fit.ok;
  for (const auto& level : s.levels) r.infimum.push_back(level.infimum);
  r.fitted = r.fitted_dual;
  r.predicted = r.predicted_dual;
  return r;
}

NormEstimate norm_lower_bound(const OperatorPair& op, double p, double q, int iterations,
                              const Eigen::VectorXd& start) {
  if (!(p > 1.0 && std::isfinite(p) && q > 1.0 && std::isfinite(q))) {
    throw DomainError("norm_lower_bound: requires 1 < p, q < infinity");
  }
  if (iterations < 1) throw DomainError("norm_lower_bound: iterations must be >= 1");
  Eigen::VectorXd f = start.size() ? start : Eigen::VectorXd::Ones(op.size);
  if (f.size() != op.size) throw DimensionError("norm_lower_bound: start vector has the wrong size");
  const double p_dual = p / (p - 1.0);
  NormEstimate out;
  for (int it = 0; it < iterations; ++it) {
    const double fn = grid_norm(f, op.cell_volume, p);
    if (!(fn > 0.0) || !std::isfinite(fn)) throw NumericError("norm_lower_bound: iterate has no finite positive norm");
    f /= fn;
    const Eigen::VectorXd g = op.forward(f);
    const double value = grid_norm(g, op.cell_volume, q);
    if (!std::isfinite(value)) throw NumericError("norm_lower_bound: non-finite operator output");
    out.value = std::max(out.value, value);
    out.history.push_back(out.value);
    if (value == 0.0) break;
    const Eigen::VectorXd u = op.adjoint(duality_map(g, q - 1.0));
    f = duality_map(u, p_dual - 1.0);
  }
  return out;
}

NormEstimate pq_norm_lower_bound(const TypePoint& pt, const GraphMeasure& gm, const ConvolveContext& ctx,
                                 int iterations) {
  pt.validate();
  if (!(pt.ip > 0.0 && pt.ip < 1.0 && pt.iq > 0.0 && pt.iq < 1.0)) {
    throw DomainError("pq_norm_lower_bound: requires 1 < p, q < infinity");
  }
  ctx.validate();
  const Grid& grid = ctx.grid;
  OperatorPair op;
  op.cell_volume = grid.cell_volume();
  op.size = static_cast<Eigen::Index>(grid.size());
  const MeasureNodes nodes = measure_nodes(gm, ctx.q);
  const int order = ctx.q.interp_order;
  op.forward = [&](const Eigen::VectorXd& v) {
    return detail::apply_all<double, false>(SampledField<double>(grid, v), nodes, order, ctx.workers, nullptr).values;
  };
  op.adjoint = [&](const Eigen::VectorXd& v) {
    return detail::apply_all<double, true>(SampledField<double>(grid, v), nodes, order, ctx.workers, nullptr).values;
  };
  return norm_lower_bound(op, 1.0 / pt.ip, 1.0 / pt.iq, iterations);
}

std::vector<ScanResult> scan(const std::vector<TypePoint>& points, const GraphMeasure& gm,
                             const ScalingLadder& ladder, const ConvolveContext& ctx, const ScanOptions& opt) {
  std::vector<ScanResult> out(points.size());
  std::string shared_error;
  ScalingSamples primary, dual;
  try {
    primary = sample_scaling(gm, ladder, ctx, false);
    dual = sample_scaling(gm, ladder, ctx, true);
  } catch (const Error& e) {
    shared_error = e.what();
  }
  ConvolveContext inner = ctx;
  inner.workers = 1;
  parallel_for(points.size(), ctx.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ScanResult& r = out[i];
      r.point = points[i];
      try {
        r.point.validate();
        annotate(r, gm);
        if (!shared_error.empty()) throw Error(shared_error);
        fill_primary(r, primary);
        const auto fd = dual_fit(r, dual);
        r.fitted_dual = fd.exponent;
        r.r2 = std::min(r.r2, fd.r2);
        r.fit_ok = r.fit_ok && fd.ok;
        r.fitted = std::min(r.fitted_primary, r.fitted_dual);
        r.predicted = std::min(r.predicted_primary, r.predicted_dual);
        const bool interior = r.point.ip > 0.0 && r.point.ip < 1.0 && r.point.iq > 0.0 && r.point.iq < 1.0;
        if (opt.norm_bounds && interior) {
          r.norm_lb = pq_norm_lower_bound(r.point, gm, inner, inner.norm_iterations).value;
        }
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  });
  return out;
}

std::vector<TypePoint> square_grid(int k) {
  if (k < 2) throw DomainError("square_grid: need at least 2 points per side");
  std::vector<TypePoint> out;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) out.push_back({i / double(k - 1), j / double(k - 1)});
  }
  return out;
}

}  // namespace hconv
