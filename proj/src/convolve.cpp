#include "hconv/convolve.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hconv/quadrature.hpp"

namespace hconv {

Grid Grid::box(int n, double half_x, double half_t, int points_x, int points_t) {
  Grid g;
  g.n = n;
  g.lo.resize(2 * n + 1);
  g.hi.resize(2 * n + 1);
  g.points.assign(2 * n + 1, points_x);
  g.lo.head(2 * n).setConstant(-half_x);
  g.hi.head(2 * n).setConstant(half_x);
  g.lo[2 * n] = -half_t;
  g.hi[2 * n] = half_t;
  g.points[2 * n] = points_t;
  g.validate();
  return g;
}

Grid Grid::reference(int points_x, int points_t) { return box(1, 4.0, 8.0, points_x, points_t); }

double Grid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dims(); ++a) v *= spacing(a);
  return v;
}

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int p : points) s *= static_cast<std::size_t>(p);
  return s;
}

void Grid::unflatten(std::size_t flat, int* index) const {
  for (int a = dims() - 1; a >= 0; --a) {
    index[a] = static_cast<int>(flat % static_cast<std::size_t>(points[a]));
    flat /= static_cast<std::size_t>(points[a]);
  }
}

void Grid::point(std::size_t flat, double* out) const {
  for (int a = dims() - 1; a >= 0; --a) {
    const auto p = static_cast<std::size_t>(points[a]);
    out[a] = coordinate(a, static_cast<int>(flat % p));
    flat /= p;
  }
}

void Grid::validate(std::size_t max_points) const {
  if (n < 1 || n > 4) throw DimensionError("Grid: n must be in [1, 4]");
  if (lo.size() != dims() || hi.size() != dims() || static_cast<int>(points.size()) != dims()) {
    throw DimensionError("Grid: expected 2n+1 axes");
  }
  for (int a = 0; a < dims(); ++a) {
    if (!(hi[a] > lo[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a])) {
      throw DomainError("Grid: axis " + std::to_string(a) + " has an empty or non-finite extent");
    }
    if (points[a] < 1) throw DomainError("Grid: every axis needs at least one point");
  }
  double total = 1.0;
  for (int p : points) total *= p;
  if (total > static_cast<double>(max_points)) throw ResolutionError("Grid: point count exceeds the memory budget");
}

bool Grid::operator==(const Grid& other) const {
  return n == other.n && points == other.points && lo == other.lo && hi == other.hi;
}

namespace {

struct PairNode {
  double c, s, weight;  // w_j = r cos, w_{n+j} = r sin; weight includes the Jacobian r
};

std::vector<PairNode> polar_pair_rule(const QuadratureSpec& q) {
  const CompositeRule inner = CompositeRule::make(0.0, 1.0, 1, q.nodes_per_axis);
  const CompositeRule outer = CompositeRule::make(1.0, std::sqrt(2.0), q.panels, q.nodes_per_axis);
  const int angles = 2 * q.nodes_per_axis;
  const double dtheta = 2.0 * std::numbers::pi / angles;
  std::vector<PairNode> out;
  for (const CompositeRule* rule : {&inner, &outer}) {
    for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
      const double r = rule->nodes[i];
      for (int k = 0; k < angles; ++k) {
        const double theta = (k + 0.5) * dtheta;
        out.push_back({r * std::cos(theta), r * std::sin(theta), rule->weights[i] * r * dtheta});
      }
    }
  }
  return out;
}

}  // namespace

MeasureNodes measure_nodes(const GraphMeasure& gm, const QuadratureSpec& q) {
  gm.validate();
  q.validate();
  const int n = gm.n;
  if (q.rule == QuadratureSpec::Rule::product) {
    const double r = std::sqrt(2.0);
    return measure_nodes(gm, q, Eigen::VectorXd::Constant(2 * n, -r), Eigen::VectorXd::Constant(2 * n, r));
  }
  const auto pair = polar_pair_rule(q);
  const std::size_t per = pair.size();
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= per;
  std::vector<double> ws, weights, phis;
  Eigen::VectorXd w(2 * n);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t code = c;
    double weight = 1.0;
    for (int j = n - 1; j >= 0; --j) {
      const PairNode& p = pair[code % per];
      code /= per;
      w[j] = p.c;
      w[n + j] = p.s;
      weight *= p.weight;
    }
    const double eta = eval_density(gm, w);
    if (eta == 0.0) continue;
    ws.insert(ws.end(), w.data(), w.data() + 2 * n);
    weights.push_back(weight * eta);
    phis.push_back(eval_phase(gm.phase, w));
  }
  MeasureNodes out;
  out.n = n;
  out.w = Eigen::Map<const Eigen::MatrixXd>(ws.data(), 2 * n, static_cast<Eigen::Index>(weights.size()));
  out.weight = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  out.phi = Eigen::Map<const Eigen::VectorXd>(phis.data(), static_cast<Eigen::Index>(phis.size()));
  return out;
}

MeasureNodes measure_nodes(const GraphMeasure& gm, const QuadratureSpec& q, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& hi) {
  gm.validate();
  q.validate();
  const int d = 2 * gm.n;
  if (lo.size() != d || hi.size() != d) throw DimensionError("measure_nodes: box must have 2n axes");
  const double r = std::sqrt(2.0);
  std::vector<CompositeRule> rules;
  for (int a = 0; a < d; ++a) {
    const double a0 = std::max(lo[a], -r), b0 = std::min(hi[a], r);
    if (!(b0 > a0)) return {gm.n, Eigen::MatrixXd(d, 0), Eigen::VectorXd(0), Eigen::VectorXd(0)};
    rules.push_back(CompositeRule::make(a0, b0, q.panels, q.nodes_per_axis));
  }
  const std::size_t per = rules[0].nodes.size();
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= per;
  std::vector<double> ws, weights, phis;
  std::vector<std::size_t> idx(d, 0);
  Eigen::VectorXd w(d);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t code = c;
    double weight = 1.0;
    for (int a = d - 1; a >= 0; --a) {
      const std::size_t i = code % per;
      code /= per;
      w[a] = rules[a].nodes[i];
      weight *= rules[a].weights[i];
    }
    const double eta = eval_density(gm, w);
    if (eta == 0.0) continue;
    ws.insert(ws.end(), w.data(), w.data() + d);
    weights.push_back(weight * eta);
    phis.push_back(eval_phase(gm.phase, w));
  }
  MeasureNodes out;
  out.n = gm.n;
  out.w = Eigen::Map<const Eigen::MatrixXd>(ws.data(), d, static_cast<Eigen::Index>(weights.size()));
  out.weight = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  out.phi = Eigen::Map<const Eigen::VectorXd>(phis.data(), static_cast<Eigen::Index>(phis.size()));
  return out;
}

}  // namespace hconv
