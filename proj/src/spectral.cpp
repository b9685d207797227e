#include "hconv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hconv/errors.hpp"
#include "hconv/parallel.hpp"

namespace hconv {

namespace {

constexpr double kPi = std::numbers::pi;

// Breakpoints on [a, b] such that increment(lo, hi) <= budget on every cell
// and no cell is wider than max_width.
template <typename Increment>
void append_cells(std::vector<double>& out, double a, double b, Increment&& increment, double budget,
                  double max_width) {
  if (out.empty() || out.back() != a) out.push_back(a);
  const double floor_width = 1e-12 * std::max(1.0, b - a);
  double t = a;
  while (t < b) {
    double w = std::min(max_width, b - t);
    while (w > floor_width && increment(t, t + w) > budget) w *= 0.5;
    t = (b - t - w < floor_width) ? b : t + w;
    out.push_back(t);
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : -1.0; }

double ipow(double x, int m) {
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

Complex unit(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Local wavenumber bound (per unit x) of L_k^{(a)}(x) e^{-x/2}, nu = k + (a+1)/2.
double laguerre_rate(double nu, double x) { return std::sqrt(nu / std::max(x, 0.25 / nu)) + 0.5; }

void check_lambda(double lambda, const char* what) {
  if (lambda == 0.0 || !std::isfinite(lambda)) throw DomainError(std::string(what) + ": lambda must be finite and non-zero");
}

Integral<Complex> checked(Integral<Complex> r, const char* what) {
  if (!r.converged) throw AccuracyError(std::string(what) + ": quadrature did not converge", r.error);
  return r;
}

QuadOptions options_for(std::size_t cells, double abs_tol, double rel_tol) {
  QuadOptions opt;
  opt.abs_tol = abs_tol;
  opt.rel_tol = rel_tol;
  opt.max_intervals = static_cast<int>(8 * cells + 2000);
  return opt;
}

Integral<Complex> radial_direct(int alpha, double lambda, double a, const CutoffSpec& cutoff) {
  const double big = std::abs(lambda);
  const double nu = alpha + 0.5;
  // Beyond x = 4 nu + 200 the Laguerre function is below e^{-60} of its scale.
  const double u_end = std::min(2.0, 2.0 * (4.0 * nu + 200.0) / big);
  auto increment = [&](double lo, double hi) {
    return (hi - lo) * (0.5 * big * laguerre_rate(nu, 0.5 * big * lo) + big * std::abs(a) + 1.0);
  };
  std::vector<double> cells;
  append_cells(cells, 0.0, std::min(1.0, u_end), increment, kPi, 0.25);
  if (u_end > 1.0) append_cells(cells, 1.0, u_end, increment, kPi, 0.25);
  auto f = [&](double u) {
    const double x = 0.5 * big * u;
    const double radial = 0.5 * eval_bump(cutoff, u) * laguerre(alpha, 0, x) * std::exp(-0.5 * x);
    return radial * unit(lambda * a * u);
  };
  return checked(integrate(f, std::span<const double>(cells), options_for(cells.size(), 1e-13 / std::max(1.0, big), 1e-12)),
                 "radial_factor");
}

Integral<Complex> radial_convolution(int alpha, double lambda, double a) {
  const double big = std::abs(lambda);
  const double xi0 = -2.0 * (lambda > 0 ? 1.0 : -1.0) * a;
  const auto table = BumpTransformTable::shared();
  const double span = std::min(400.0, table->extent());
  auto xi_of = [&](double u) { return xi0 - 2.0 * u / big; };
  auto increment = [&](double lo, double hi) {
    const double xl = xi_of(lo), xh = xi_of(hi);
    const double nearest = (xl > 0.0) != (xh > 0.0) ? 0.0 : std::min(std::abs(xl), std::abs(xh));
    return (hi - lo) * (2.0 + (2.0 / big) * (alpha + 1.0) / (0.25 + nearest * nearest));
  };
  std::vector<double> cells;
  append_cells(cells, -span, span, increment, kPi, 1.0);
  auto f = [&](double u) { return F_nk_hat(1, alpha, xi_of(u)) * table->value(u); };
  auto r = checked(integrate(f, std::span<const double>(cells), options_for(cells.size(), 1e-12, 1e-11)),
                   "radial_factor");
  const double scale = 1.0 / (2.0 * kPi * big);
  r.value *= scale;
  r.error *= scale;
  return r;
}


}  // namespace

Integral<Complex> radial_factor(int alpha, double lambda, double a, const CutoffSpec& cutoff, RadialRoute route) {
  check_lambda(lambda, "radial_factor");
  if (alpha < 0) throw DomainError("radial_factor: alpha must be non-negative");
  cutoff.validate();
  if (route == RadialRoute::convolution) return radial_convolution(alpha, lambda, a);
  return radial_direct(alpha, lambda, a, cutoff);
}

DiagonalEntry mu_entry(Complex z, int N, const MultiIndex& alpha, double lambda, const GraphMeasure& gm,
                       const MollifierSpec& mollifier) {
  check_lambda(lambda, "mu_entry");
  gm.validate();
  if (gm.phase.kind != PhaseSpec::Kind::quadratic) throw DomainError("mu_entry: requires a quadratic phase");
  if (static_cast<int>(alpha.size()) != gm.n) throw DimensionError("mu_entry: multi-index length must equal n");
  const Complex prefactor = fractional_kernel(1.0 - z, -lambda) * mollifier_value(mollifier, N, lambda);
  Complex product = 1.0;
  std::vector<Integral<Complex>> factors;
  for (int j = 0; j < gm.n; ++j) {
    factors.push_back(radial_factor(alpha[j], lambda, gm.phase.a[j], gm.cutoffs[j]));
    product *= factors.back().value;
  }
  double error = 0.0;
  for (int j = 0; j < gm.n; ++j) {
    double others = 1.0;
    for (int i = 0; i < gm.n; ++i) others *= i == j ? 1.0 : std::abs(factors[i].value);
    error += factors[j].error * others;
  }
  return {alpha, lambda, z, N, prefactor * product, std::abs(prefactor) * error};
}

double mu_bound(Complex z, const GraphMeasure& gm, const MollifierSpec& mollifier) {
  gm.validate();
  double bound = std::pow(2.0, gm.n) * std::abs(rgamma(0.5 * (1.0 - z))) * mollifier.sup_norm();
  for (const auto& c : gm.cutoffs) bound *= bump_hat_l1(c).value;
  return bound;
}

DiagonalEntry upsilon_entry(Complex z, int N, int k, double lambda, int m, int n, const CutoffSpec& cutoff,
                            const MollifierSpec& mollifier) {
  check_lambda(lambda, "upsilon_entry");
  if (k < 0 || m < 1 || n < 1) throw DomainError("upsilon_entry: need k >= 0, m >= 1, n >= 1");
  cutoff.validate();
  const double big = std::abs(lambda);
  const double nu = k + 0.5 * n;
  const double u_end = std::min(2.0, 2.0 * (4.0 * nu + 200.0) / big);
  auto increment = [&](double lo, double hi) {
    const double laguerre_part = 0.5 * big * laguerre_rate(nu, 0.5 * big * lo);
    const double phase_part = big * m * ipow(hi, m - 1);
    return (hi - lo) * (laguerre_part + phase_part + 1.0);
  };
  std::vector<double> cells;
  append_cells(cells, 0.0, std::min(1.0, u_end), increment, kPi, 0.25);
  if (u_end > 1.0) append_cells(cells, 1.0, u_end, increment, kPi, 0.25);
  auto f = [&](double u) {
    const double x = 0.5 * big * u;
    const double radial = 0.5 * eval_bump(cutoff, u) * laguerre(k, n - 1, x) * std::exp(-0.5 * x) * ipow(u, n - 1);
    return radial * unit(lambda * ipow(u, m));
  };
  const auto integral = checked(
      integrate(f, std::span<const double>(cells), options_for(cells.size(), 1e-13 / std::max(1.0, big), 1e-12)),
      "upsilon_entry");
  const double ratio = std::exp(std::lgamma(k + 1.0) - std::lgamma(k + static_cast<double>(n)));
  const Complex prefactor = ratio * fractional_kernel(1.0 - z, -lambda) * mollifier_value(mollifier, N, lambda);
  return {{k}, lambda, z, N, prefactor * integral.value, std::abs(prefactor) * integral.error};
}

Integral<Complex> R_lambda_hat(double lambda, int m, double xi) {
  check_lambda(lambda, "R_lambda_hat");
  if (m < 1) throw DomainError("R_lambda_hat: m must be >= 1");
  const double big = std::abs(lambda);
  const double s = sign(lambda);
  const double lead = std::ldexp(s, m);
  auto phase = [&](double tau) { return big * (lead * ipow(tau, m) - xi * tau); };
  std::vector<double> cuts{0.0};
  if (m >= 2 && xi * s > 0.0) {
    const double stationary = std::pow(xi * s / (m * std::ldexp(1.0, m)), 1.0 / (m - 1));
    if (stationary > 0.0 && stationary < 1.0) cuts.push_back(stationary);
  }
  cuts.push_back(1.0);
  auto increment = [&](double lo, double hi) { return std::abs(phase(hi) - phase(lo)); };
  std::vector<double> cells;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) append_cells(cells, cuts[i], cuts[i + 1], increment, kPi, 0.125);
  auto f = [&](double tau) { return unit(phase(tau)); };
  // exp(i psi) carries an absolute rounding error of order eps |psi|.
  const double psi_max = big * (std::ldexp(1.0, m) + std::abs(xi));
  const double abs_tol = std::max(1e-13, 8.0 * std::numeric_limits<double>::epsilon() * psi_max);
  auto r = checked(integrate(f, std::span<const double>(cells), options_for(cells.size(), abs_tol, 1e-12)),
                   "R_lambda_hat");
  r.value *= big;
  r.error *= big;
  return r;
}

SupEstimate R_lambda_hat_sup(double lambda, int m) {
  check_lambda(lambda, "R_lambda_hat_sup");
  if (m < 2) throw DomainError("R_lambda_hat_sup: m must be >= 2");
  const double big = std::abs(lambda);
  const double slope = m * std::ldexp(1.0, m);
  auto magnitude = [&](double xi) { return std::abs(R_lambda_hat(big, m, xi).value); };

  std::vector<double> xs;
  // Degenerate window: stationary point tau* = c |lambda|^{-1/m}, c in [0, 4].
  const double scale = std::pow(big, -1.0 / m);
  for (int i = -40; i <= 160; ++i) {
    const double c = 4.0 * i / 160.0;
    const double tau = std::abs(c) * scale;
    const double xi = (c < 0 ? -1.0 : 1.0) * slope * std::pow(tau, m - 1);
    xs.push_back(xi);
  }
  // Whole stationary range tau* in [0, 1] plus margins.
  for (int i = 0; i <= 120; ++i) xs.push_back(-1.0 + (slope + 2.0) * i / 120.0);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) vals[i] = magnitude(xs[i]);

  std::vector<std::size_t> order(xs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return vals[l] > vals[r]; });

  SupEstimate best{vals[order[0]], xs[order[0]]};
  const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
  for (std::size_t rank = 0; rank < std::min<std::size_t>(2, order.size()); ++rank) {
    const std::size_t i = order[rank];
    double lo = xs[i == 0 ? 0 : i - 1];
    double hi = xs[std::min(i + 1, xs.size() - 1)];
    double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
    double f1 = magnitude(x1), f2 = magnitude(x2);
    for (int it = 0; it < 30; ++it) {
      if (f1 > f2) {
        hi = x2, x2 = x1, f2 = f1;
        x1 = hi - golden * (hi - lo), f1 = magnitude(x1);
      } else {
        lo = x1, x1 = x2, f1 = f2;
        x2 = lo + golden * (hi - lo), f2 = magnitude(x2);
      }
    }
    if (f1 > best.value) best = {f1, x1};
    if (f2 > best.value) best = {f2, x2};
  }
  // R_{-lambda}^(xi) = conj(R_lambda^(-xi)).
  if (lambda < 0.0) best.argmax = -best.argmax;
  return best;
}

double van_der_corput_constant(int m, const std::vector<double>& lambdas) {
  double c = 1.0;
  for (double lambda : lambdas) {
    const double big = std::abs(lambda);
    if (big < 1.0) continue;  // |R^| <= |lambda| <= |lambda|^{(m-1)/m} there
    c = std::max(c, R_lambda_hat_sup(big, m).value / std::pow(big, (m - 1.0) / m));
  }
  return c;
}

double upsilon_uniform_constant(Complex z, int n, double c_m, const CutoffSpec& cutoff,
                                const MollifierSpec& mollifier) {
  if (n < 2) throw DomainError("upsilon_uniform_constant: n must be >= 2");
  // integral (1/4 + xi^2)^{-n/2} d xi
  const double b_n = std::ldexp(std::sqrt(kPi), n - 1) * std::exp(std::lgamma(0.5 * (n - 1)) - std::lgamma(0.5 * n));
  return std::pow(2.0, -0.5 * (1.0 - z.real())) * mollifier.sup_norm() * std::ldexp(1.0, n - 1) /
         (4.0 * kPi * kPi) * b_n * bump_hat_l1(cutoff).value * c_m;
}

std::vector<double> signed_log_grid(double lo, double hi, int per_sign) {
  if (!(lo > 0.0) || !(hi > lo) || per_sign < 2) throw DomainError("signed_log_grid: need 0 < lo < hi, per_sign >= 2");
  std::vector<double> out;
  for (int i = per_sign - 1; i >= 0; --i) out.push_back(-lo * std::pow(hi / lo, i / (per_sign - 1.0)));
  for (int i = 0; i < per_sign; ++i) out.push_back(lo * std::pow(hi / lo, i / (per_sign - 1.0)));
  return out;
}

std::vector<MuSweepRow> mu_sweep(const MuSweepSpec& spec) {
  spec.gm.validate();
  const int n = spec.gm.n;
  if (spec.gm.phase.kind != PhaseSpec::Kind::quadratic) throw DomainError("mu_sweep: requires a quadratic phase");
  if (spec.alpha_max < 0) throw DomainError("mu_sweep: alpha_max must be non-negative");
  // Multi-indices with |alpha| <= alpha_max, lexicographic.
  std::vector<MultiIndex> indices;
  MultiIndex current(n, 0);
  std::function<void(int, int)> enumerate = [&](int axis, int budget) {
    if (axis == n) {
      indices.push_back(current);
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      current[axis] = v;
      enumerate(axis + 1, budget - v);
    }
  };
  enumerate(0, spec.alpha_max);

  const auto mollifier = MollifierSpec::shared();
  std::vector<double> bounds;
  for (const auto& z : spec.z) bounds.push_back(mu_bound(z, spec.gm, *mollifier));

  const std::size_t per_lambda = indices.size() * spec.z.size() * spec.N.size();
  std::vector<MuSweepRow> rows(per_lambda * spec.lambdas.size());
  parallel_for(spec.lambdas.size(), spec.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t li = begin; li < end; ++li) {
      const double lambda = spec.lambdas[li];
      std::vector<std::vector<Complex>> factors(n);
      for (int j = 0; j < n; ++j) {
        for (int a = 0; a <= spec.alpha_max; ++a) {
          factors[j].push_back(radial_factor(a, lambda, spec.gm.phase.a[j], spec.gm.cutoffs[j]).value);
        }
      }
      std::size_t row = li * per_lambda;
      for (std::size_t zi = 0; zi < spec.z.size(); ++zi) {
        for (int N : spec.N) {
          const Complex prefactor = fractional_kernel(1.0 - spec.z[zi], -lambda) * mollifier_value(*mollifier, N, lambda);
          for (const auto& alpha : indices) {
            Complex value = prefactor;
            for (int j = 0; j < n; ++j) value *= factors[j][alpha[j]];
            const double magnitude = std::abs(value);
            rows[row++] = {spec.z[zi], N, alpha, lambda, magnitude, bounds[zi], magnitude / bounds[zi]};
          }
        }
      }
    }
  });
  return rows;
}

namespace {

// a_alpha = integral_0^R A(r) L_alpha(lambda r^2 / 2) e^{-lambda r^2 / 4} r dr for alpha <= kmax.
Eigen::VectorXd laguerre_coefficients(const std::function<double(double)>& A, double lambda, int kmax, double extent) {
  const double r_end = std::min(extent, std::sqrt(2.0 * (4.0 * kmax + 200.0) / lambda));
  // Zeros of the highest Laguerre function are roughly uniform in r with this spacing.
  const double spacing = kPi / std::sqrt(2.0 * (kmax + 1.0) * lambda);
  const int panels = std::max(16, static_cast<int>(std::ceil(r_end / (2.0 * spacing))));
  const auto rule = CompositeRule::make(0.0, r_end, panels, 16);
  Eigen::VectorXd coeff = Eigen::VectorXd::Zero(kmax + 1);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double r = rule.nodes[i];
    const double weight = rule.weights[i] * A(r) * r;
    if (weight == 0.0) continue;
    coeff += weight * laguerre_functions(kmax, 0, 0.5 * lambda * r * r);
  }
  return coeff;
}

struct LaguerreSum {
  double total = 0.0;
  int kmax = 0;
};

LaguerreSum laguerre_square_sum(const std::function<double(double)>& A, double lambda, double extent,
                                const PlancherelOptions& opt) {
  for (int k = opt.alpha_start; k <= opt.alpha_cap; k *= 2) {
    const Eigen::VectorXd a = laguerre_coefficients(A, lambda, k, extent);
    const double total = a.squaredNorm();
    const double tail = a.tail(k - k / 2).squaredNorm();
    if (tail <= opt.tail_tol * total) return {total, k};
    if (2 * k > opt.alpha_cap) {
      throw AccuracyError("plancherel_ratio: Laguerre truncation did not converge at lambda = " + std::to_string(lambda),
                          tail / total);
    }
  }
  throw AccuracyError("plancherel_ratio: alpha_cap below alpha_start", 1.0);
}

}  // namespace

PlancherelResult plancherel_ratio(const SeparableKernel& kernel, const PlancherelOptions& opt) {
  const int n = static_cast<int>(kernel.radial.size());
  if (n < 1 || !kernel.central) throw DimensionError("plancherel_ratio: kernel needs n >= 1 radial factors and B");
  if (!(opt.lambda_lo > 0.0)) throw DomainError("plancherel_ratio: lambda_lo must be positive");
  QuadOptions fine;
  fine.abs_tol = 1e-15;
  fine.rel_tol = 1e-13;

  PlancherelResult out;
  // ||K||_2^2 = prod_j 2 pi integral A_j^2 r dr * integral B^2 dt.
  std::vector<double> radial_bp{0.0};
  for (double r = 0.5; r < kernel.radial_extent; r *= 2.0) radial_bp.push_back(r);
  radial_bp.push_back(kernel.radial_extent);
  double norm2 = 1.0;
  for (const auto& A : kernel.radial) {
    norm2 *= 2.0 * kPi * integrate([&](double r) { return A(r) * A(r) * r; }, std::span<const double>(radial_bp), fine).value;
  }
  const double T = kernel.central_extent;
  const double central_bp[] = {-T, -1.0, 0.0, 1.0, T};
  norm2 *= integrate([&](double t) { return kernel.central(t) * kernel.central(t); },
                     std::span<const double>(central_bp), fine)
               .value;
  out.kernel_norm2 = norm2;

  auto central_hat = [&](double lambda) {
    return fourier_quadrature([&](double t) { return Complex(kernel.central(t)); }, lambda, {-T, T}, 1e-12).value;
  };
  double peak = 0.0;
  for (double l = opt.lambda_lo; l <= 4.0; l *= 1.25) peak = std::max(peak, std::abs(central_hat(l)));
  double lambda_hi = 4.0;
  while (std::abs(central_hat(lambda_hi)) > 1e-9 * peak) {
    lambda_hi *= 1.25;
    if (lambda_hi > 1e4) throw AccuracyError("plancherel_ratio: central transform does not decay", lambda_hi);
  }
  out.lambda_hi = lambda_hi;

  // Entry density g(lambda) = |B^|^2 prod_j S_j |lambda|^n on lambda > 0.
  std::vector<int> kmax_used;
  auto density = [&](double lambda, int* kmax) {
    double value = std::norm(central_hat(lambda)) * std::pow(lambda, n);
    int k = 0;
    for (const auto& A : kernel.radial) {
      const auto s = laguerre_square_sum(A, lambda, kernel.radial_extent, opt);
      value *= s.total;
      k = std::max(k, s.kmax);
    }
    if (kmax) *kmax = k;
    return value;
  };

  const auto rule = CompositeRule::make(std::log(opt.lambda_lo), std::log(lambda_hi), opt.lambda_panels, 8);
  std::vector<double> contrib(rule.nodes.size());
  std::vector<int> kmax(rule.nodes.size());
  parallel_for(rule.nodes.size(), opt.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double lambda = std::exp(rule.nodes[i]);
      contrib[i] = rule.weights[i] * lambda * density(lambda, &kmax[i]);
    }
  });
  double integral = 0.0;
  for (double c : contrib) integral += c;
  out.alpha_max = *std::max_element(kmax.begin(), kmax.end());

  // Power-law extrapolation below lambda_lo.
  int k_lo = 0;
  const double g1 = density(opt.lambda_lo, &k_lo);
  const double g2 = density(2.0 * opt.lambda_lo, nullptr);
  const double p = std::log(g2 / g1) / std::log(2.0);
  if (!(p > -1.0)) throw AccuracyError("plancherel_ratio: entry density not integrable at lambda -> 0", p);
  const double tail = g1 * opt.lambda_lo / (p + 1.0);
  out.alpha_max = std::max(out.alpha_max, k_lo);

  // Both signs of lambda contribute equally for real kernels.
  out.entry_integral = 2.0 * (integral + tail);
  out.small_lambda_tail = tail / (integral + tail);
  out.ratio = out.kernel_norm2 / out.entry_integral;
  return out;
}

}  // namespace hconv
