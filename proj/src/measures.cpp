#include "hconv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "hconv/quadrature.hpp"

namespace hconv {

namespace {

double psi(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

void require_length(const Eigen::Ref<const Eigen::VectorXd>& w, int n, const char* what) {
  if (w.size() != 2 * n) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(2 * n) + ", got " +
                         std::to_string(w.size()));
  }
}

// Integral of |ghat| over [0, xi_max]: sign changes are bracketed on a
// lattice of spacing xi_step and refined by bisection, so |ghat| is smooth on
// every cell and Gauss-Legendre is spectrally accurate there. The error is the
// 10- vs 20-point discrepancy plus an envelope-extrapolated tail.
FourierL1 half_line_l1(const std::function<double(double)>& ghat, double xi_max, double xi_step) {
  const int steps = std::max(8, static_cast<int>(std::ceil(xi_max / xi_step)));
  const double h = xi_max / steps;
  std::vector<double> cuts{0.0};
  double prev = ghat(0.0);
  for (int i = 1; i <= steps; ++i) {
    const double x = i * h;
    const double cur = ghat(x);
    if ((prev < 0.0) != (cur < 0.0) && prev != 0.0 && cur != 0.0) {
      double lo = x - h, hi = x;
      const bool lo_negative = prev < 0.0;
      for (int it = 0; it < 60 && hi - lo > 1e-11; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((ghat(mid) < 0.0) == lo_negative ? lo : hi) = mid;
      }
      cuts.push_back(0.5 * (lo + hi));
    }
    prev = cur;
  }
  cuts.push_back(xi_max);

  const auto& g20 = GaussLegendre::get(20);
  const auto& g10 = GaussLegendre::get(10);
  double body = 0.0, body_error = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    // Long zero-free stretches are split so the fixed rule stays resolved.
    const double a = cuts[c], b = cuts[c + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / 2.0)));
    for (int p = 0; p < pieces; ++p) {
      const double lo = a + (b - a) * p / pieces, hi = a + (b - a) * (p + 1) / pieces;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double fine = 0.0, coarse = 0.0;
      for (std::size_t i = 0; i < g20.nodes.size(); ++i) fine += g20.weights[i] * std::abs(ghat(mid + half * g20.nodes[i]));
      for (std::size_t i = 0; i < g10.nodes.size(); ++i) coarse += g10.weights[i] * std::abs(ghat(mid + half * g10.nodes[i]));
      body += half * fine;
      body_error += half * std::abs(fine - coarse);
    }
  }

  auto window_max = [&](double lo, double hi) {
    double m = 0.0;
    for (double x = lo; x <= hi; x += h) m = std::max(m, std::abs(ghat(x)));
    return m;
  };
  const double xa = 0.625 * xi_max;
  const double xb = 0.875 * xi_max;
  const double ea = window_max(0.5 * xi_max, 0.75 * xi_max);
  const double eb = window_max(0.75 * xi_max, xi_max);
  double tail = eb * xi_max;
  if (eb > 0.0 && ea > eb) {
    // Smooth compactly supported bumps decay like exp(-c sqrt(xi)).
    const double c = std::log(ea / eb) / (std::sqrt(xb) - std::sqrt(xa));
    const double root = std::sqrt(xi_max);
    tail = eb * std::exp(c * (std::sqrt(xb) - root)) * 2.0 * (root / c + 1.0 / (c * c));
  }
  return {body + tail, body_error + tail};
}

}  // namespace

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double p = psi(u);
  return p / (p + psi(1.0 - u));
}

double eval_bump(const CutoffSpec& /*c*/, double t) {
  const double a = std::abs(t);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return smooth_step(2.0 - a);
}

PhaseSpec PhaseSpec::quadratic(Eigen::VectorXd coefficients) {
  PhaseSpec p;
  p.kind = Kind::quadratic;
  p.a = std::move(coefficients);
  return p;
}

PhaseSpec PhaseSpec::power(int exponent) {
  PhaseSpec p;
  p.kind = Kind::power;
  p.m = exponent;
  return p;
}

void PhaseSpec::validate(int n) const {
  if (kind == Kind::quadratic) {
    if (a.size() != n) {
      throw DimensionError("PhaseSpec: quadratic phase needs " + std::to_string(n) + " coefficients, got " +
                           std::to_string(a.size()));
    }
    if (!a.allFinite()) throw DomainError("PhaseSpec: coefficients must be finite");
  } else if (m < 1) {
    throw DomainError("PhaseSpec: power exponent m must be >= 1");
  }
}

double eval_phase(const PhaseSpec& phase, const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (w.size() < 2 || w.size() % 2 != 0) throw DimensionError("eval_phase: w must have length 2n");
  const Eigen::Index n = w.size() / 2;
  if (phase.kind == PhaseSpec::Kind::quadratic) {
    if (phase.a.size() != n) throw DimensionError("eval_phase: coefficient count does not match w");
    return phase.a.dot(w.head(n).cwiseAbs2() + w.tail(n).cwiseAbs2());
  }
  return std::pow(w.squaredNorm(), phase.m);
}

Eigen::VectorXd phase_gradient(const PhaseSpec& phase, const Eigen::Ref<const Eigen::VectorXd>& w) {
  if (w.size() < 2 || w.size() % 2 != 0) throw DimensionError("phase_gradient: w must have length 2n");
  const Eigen::Index n = w.size() / 2;
  Eigen::VectorXd g(w.size());
  if (phase.kind == PhaseSpec::Kind::quadratic) {
    if (phase.a.size() != n) throw DimensionError("phase_gradient: coefficient count does not match w");
    g.head(n) = 2.0 * phase.a.cwiseProduct(w.head(n));
    g.tail(n) = 2.0 * phase.a.cwiseProduct(w.tail(n));
    return g;
  }
  const double r2 = w.squaredNorm();
  return 2.0 * phase.m * std::pow(r2, phase.m - 1) * w;
}

GraphMeasure GraphMeasure::quadratic(Eigen::VectorXd a, CutoffSpec cutoff) {
  GraphMeasure gm;
  gm.n = static_cast<int>(a.size());
  gm.phase = PhaseSpec::quadratic(std::move(a));
  gm.cutoffs.assign(gm.n, cutoff);
  gm.validate();
  return gm;
}

GraphMeasure GraphMeasure::power(int n, int m, CutoffSpec cutoff) {
  GraphMeasure gm;
  gm.n = n;
  gm.phase = PhaseSpec::power(m);
  gm.cutoffs.assign(1, cutoff);
  gm.validate();
  return gm;
}

void GraphMeasure::validate() const {
  if (n < 1) throw DimensionError("GraphMeasure: n must be >= 1");
  phase.validate(n);
  const std::size_t expected = phase.kind == PhaseSpec::Kind::quadratic ? static_cast<std::size_t>(n) : 1u;
  if (cutoffs.size() != expected) {
    throw DimensionError("GraphMeasure: expected " + std::to_string(expected) + " cutoffs, got " +
                         std::to_string(cutoffs.size()));
  }
  for (const auto& c : cutoffs) c.validate();
}

double eval_density(const GraphMeasure& gm, const Eigen::Ref<const Eigen::VectorXd>& w) {
  require_length(w, gm.n, "eval_density");
  const int n = gm.n;
  if (gm.phase.kind == PhaseSpec::Kind::power) return eval_bump(gm.cutoffs[0], w.squaredNorm());
  double value = 1.0;
  for (int j = 0; j < n && value != 0.0; ++j) {
    value *= eval_bump(gm.cutoffs[j], w[j] * w[j] + w[n + j] * w[n + j]);
  }
  return value;
}

double phase_gradient_sup(const GraphMeasure& gm, int samples_per_axis) {
  gm.validate();
  const int d = 2 * gm.n;
  const double r = std::sqrt(2.0);
  Eigen::VectorXd w(d);
  std::vector<int> idx(d, 0);
  double best = 0.0;
  while (true) {
    for (int i = 0; i < d; ++i) w[i] = -r + 2.0 * r * idx[i] / (samples_per_axis - 1);
    if (eval_density(gm, w) > 0.0) best = std::max(best, phase_gradient(gm.phase, w).norm());
    int axis = 0;
    while (axis < d && ++idx[axis] == samples_per_axis) idx[axis++] = 0;
    if (axis == d) break;
  }
  return best;
}

BumpTransform::BumpTransform(int panels, int order) {
  const auto rule = CompositeRule::make(1.0, 2.0, panels, order);
  nodes_ = rule.nodes;
  weighted_.resize(nodes_.size());
  const CutoffSpec c;
  for (std::size_t i = 0; i < nodes_.size(); ++i) weighted_[i] = rule.weights[i] * eval_bump(c, nodes_[i]);
}

double BumpTransform::value(double xi) const {
  // 2 * [integral_0^1 cos(s xi) ds + integral_1^2 eta(s) cos(s xi) ds]
  const double plateau = std::abs(xi) < 1e-8 ? 1.0 - xi * xi / 6.0 : std::sin(xi) / xi;
  double transition = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) transition += weighted_[i] * std::cos(nodes_[i] * xi);
  return 2.0 * (plateau + transition);
}

double BumpTransform::derivative(double xi) const {
  double plateau;
  if (std::abs(xi) < 1e-4) {
    plateau = -xi / 3.0 + xi * xi * xi / 30.0;
  } else {
    plateau = (xi * std::cos(xi) - std::sin(xi)) / (xi * xi);
  }
  double transition = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    transition -= weighted_[i] * nodes_[i] * std::sin(nodes_[i] * xi);
  }
  return 2.0 * (plateau + transition);
}

std::pair<double, double> BumpTransform::value_and_derivative(double xi) const {
  double plateau, plateau_d;
  if (std::abs(xi) < 1e-4) {
    plateau = 1.0 - xi * xi / 6.0 + xi * xi * xi * xi / 120.0;
    plateau_d = -xi / 3.0 + xi * xi * xi / 30.0;
  } else {
    const double sn = std::sin(xi), cs = std::cos(xi);
    plateau = sn / xi;
    plateau_d = (xi * cs - sn) / (xi * xi);
  }
  double v = 0.0, d = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double arg = nodes_[i] * xi;
    v += weighted_[i] * std::cos(arg);
    d -= weighted_[i] * nodes_[i] * std::sin(arg);
  }
  return {2.0 * (plateau + v), 2.0 * (plateau_d + d)};
}

void BumpTransform::tabulate(double step, int count, std::vector<double>& values,
                             std::vector<double>& slopes) const {
  values.assign(count, 0.0);
  slopes.assign(count, 0.0);
  // Angle addition within short blocks; each block restarts from exact
  // sin/cos so rounding growth stays at a few ulps.
  constexpr int kBlock = 32;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double node = nodes_[i];
    const double w = weighted_[i];
    const double ch = std::cos(node * step), sh = std::sin(node * step);
    for (int k0 = 0; k0 < count; k0 += kBlock) {
      double c = std::cos(node * step * k0), s = std::sin(node * step * k0);
      const int k1 = std::min(count, k0 + kBlock);
      for (int k = k0; k < k1; ++k) {
        values[k] += w * c;
        slopes[k] -= w * node * s;
        const double cn = c * ch - s * sh;
        s = s * ch + c * sh;
        c = cn;
      }
    }
  }
  for (int k = 0; k < count; ++k) {
    const double xi = k * step;
    double plateau, plateau_d;
    if (std::abs(xi) < 1e-4) {
      plateau = 1.0 - xi * xi / 6.0 + xi * xi * xi * xi / 120.0;
      plateau_d = -xi / 3.0 + xi * xi * xi / 30.0;
    } else {
      plateau = std::sin(xi) / xi;
      plateau_d = (xi * std::cos(xi) - std::sin(xi)) / (xi * xi);
    }
    values[k] = 2.0 * (plateau + values[k]);
    slopes[k] = 2.0 * (plateau_d + slopes[k]);
  }
}

const BumpTransform& BumpTransform::shared() {
  static const BumpTransform instance;
  return instance;
}

BumpTransformTable::BumpTransformTable(double step, double extent) : step_(step) {
  if (!(step > 0.0) || !(extent > step)) throw DomainError("BumpTransformTable: step and extent must be positive");
  const int count = static_cast<int>(std::ceil(extent / step)) + 1;
  extent_ = (count - 1) * step_;
  BumpTransform::shared().tabulate(step_, count, values_, slopes_);
}

double BumpTransformTable::value(double xi) const {
  const double ax = std::abs(xi);
  if (ax >= extent_) return BumpTransform::shared().value(ax);
  const auto i = static_cast<std::size_t>(ax / step_);
  const double t = ax / step_ - static_cast<double>(i);
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * values_[i] + h10 * step_ * slopes_[i] + h01 * values_[i + 1] + h11 * step_ * slopes_[i + 1];
}

std::shared_ptr<const BumpTransformTable> BumpTransformTable::shared() {
  static const auto instance = std::make_shared<const BumpTransformTable>();
  return instance;
}

FourierL1 fourier_l1_norm_even(const std::function<double(double)>& g, double half_support, double xi_max,
                               double xi_step) {
  if (!(half_support > 0.0) || !(xi_max > 0.0) || !(xi_step > 0.0)) {
    throw DomainError("fourier_l1_norm_even: support, xi_max and xi_step must be positive");
  }
  const int panels = std::max(64, static_cast<int>(std::ceil(xi_max * half_support / 3.0)));
  const auto rule = CompositeRule::make(0.0, half_support, panels, 16);
  std::vector<double> weighted(rule.nodes.size());
  for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] = rule.weights[i] * g(rule.nodes[i]);
  auto ghat = [&](double xi) {
    double s = 0.0;
    for (std::size_t i = 0; i < weighted.size(); ++i) s += weighted[i] * std::cos(rule.nodes[i] * xi);
    return 2.0 * s;
  };
  const auto half = half_line_l1(ghat, xi_max, xi_step);
  return {2.0 * half.value, 2.0 * half.error};
}

FourierL1 bump_hat_l1(const CutoffSpec& c) {
  c.validate();
  static std::mutex mutex;
  static std::map<int, FourierL1> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(c.resolution); it != cache.end()) return it->second;
  const auto& transform = BumpTransform::shared();
  const double xi_max = 150.0 * c.resolution;
  const double xi_step = 0.1;
  const auto half = half_line_l1([&](double xi) { return transform.value(xi); }, xi_max, xi_step);
  const FourierL1 result{2.0 * half.value, 2.0 * half.error};
  cache.emplace(c.resolution, result);
  return result;
}

}  // namespace hconv
