#include "hconv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hconv/errors.hpp"
#include "hconv/quadrature.hpp"

namespace hconv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// |r|^w for r > 0 with the principal real-base branch.
Complex real_power(double r, Complex w) { return std::exp(w * std::log(r)); }

Integral<Complex> checked(Integral<Complex> r, const char* what) {
  if (!r.converged) throw AccuracyError(std::string(what) + ": quadrature did not converge", r.error);
  return r;
}

QuadOptions kernel_options(int breakpoints, double scale = 1.0) {
  QuadOptions opt;
  opt.abs_tol = 1e-11 * std::max(1.0, scale);  // H table accuracy
  opt.rel_tol = 1e-10;
  opt.max_intervals = std::max(4000, 4 * breakpoints);
  return opt;
}

// c_z N^{1-z} integral_{-1}^{1} |v0 - v|^{z-1} H^(v) dv with v0 = s N.
Complex space_side(const SmoothedKernel& spec, double s) {
  const Complex z = spec.z;
  const double a = z.real();
  const double y = z.imag();
  const double v0 = s * spec.N;
  const Complex c = fractional_constant(z);
  if (c == Complex(0.0)) return 0.0;
  const Complex prefactor = c * real_power(spec.N, 1.0 - z);
  const auto& mol = *spec.mollifier;

  if (std::abs(v0) < 1.0) {
    if (a <= 0.0) throw DomainError("smoothed_kernel_eval: space side needs |s| > 1/N when Re z <= 0");
    // Power substitution v - v0 = +-d u^{1/a} absorbs the singularity:
    // |v - v0|^{z-1} dv = (d^z / a) u^{i y / a} du.
    Complex total = 0.0;
    double error = 0.0;
    for (int side : {-1, 1}) {
      const double d = side > 0 ? 1.0 - v0 : 1.0 + v0;
      auto f = [&](double u) {
        const double v = v0 + side * d * std::pow(u, 1.0 / a);
        const Complex phase = y == 0.0 ? Complex(1.0) : std::exp(Complex(0.0, y / a * std::log(u)));
        return phase * mol.hat(v);
      };
      std::vector<double> bp{0.0, 1.0};
      for (double edge : {-0.5, 0.5}) {
        const double r = (edge - v0) * side / d;
        if (r > 0.0 && r < 1.0) bp.push_back(std::pow(r, a));
      }
      std::sort(bp.begin(), bp.end());
      const auto piece = checked(integrate(f, std::span<const double>(bp), kernel_options(0)), "space side");
      total += real_power(d, z) / a * piece.value;
      error += std::abs(real_power(d, z) / a) * piece.error;
    }
    (void)error;
    return prefactor * total;
  }
  if (a <= 0.0 && std::abs(v0) <= 1.0) {
    throw DomainError("smoothed_kernel_eval: space side needs |s| > 1/N when Re z <= 0");
  }
  auto f = [&](double v) { return real_power(std::abs(v0 - v), z - 1.0) * mol.hat(v); };
  const double bp[] = {-1.0, -0.5, 0.5, 1.0};
  const auto r = checked(integrate(f, std::span<const double>(bp), kernel_options(0)), "space side");
  return prefactor * r.value;
}

// 2 sqrt(2 pi) C_{1-z} N^{1-z} integral_0^inf x^{-z} H(x) cos(s N x) dx.
Complex frequency_side(const SmoothedKernel& spec, double s) {
  const Complex z = spec.z;
  const double a = z.real();
  if (a > 1.0) throw DomainError("smoothed_kernel_eval: frequency side needs Re z <= 1");
  const Complex c = fractional_constant(1.0 - z);
  if (c == Complex(0.0) && z != Complex(1.0)) return 0.0;
  const Complex prefactor = 2.0 * std::sqrt(kTwoPi) * real_power(spec.N, 1.0 - z);
  const auto& mol = *spec.mollifier;
  const double w = std::abs(s) * spec.N;
  const double x1 = 1.0;
  const double extent = mol.table_extent();
  // Cancellation in the cosine transform is limited by integral x^{-a} |H(x)|.
  double mass = 1.0;
  if (a < 0.0) {
    QuadOptions coarse;
    coarse.rel_tol = 1e-3;
    coarse.abs_tol = 1e-12;
    const double bp[] = {0.0, 8.0, 64.0, extent};
    mass = integrate([&](double x) { return std::pow(x, -a) * std::abs(mol.value(x)); }, std::span<const double>(bp),
                     coarse)
               .value;
  }

  Complex near;
  if (a > 0.0) {
    // integral_0^1 x^{-z} g = integral_0^1 x^{-z} (g - g(0)) + g(0) / (1 - z), and
    // C_w / w = 2^{-w/2} / (2 Gamma(1 + w/2)) stays finite as w = 1 - z -> 0.
    const double g0 = mol.value(0.0);
    auto f = [&](double x) { return real_power(x, -z) * (mol.value(x) * std::cos(w * x) - g0); };
    const Complex rest = c == Complex(0.0) ? Complex(0.0)
                                           : c * checked(integrate(f, 0.0, x1, kernel_options(0)), "frequency side").value;
    const Complex wz = 1.0 - z;
    const Complex pole = g0 * std::exp(-0.5 * wz * std::numbers::ln2) * 0.5 * rgamma(1.0 + 0.5 * wz);
    near = rest + pole;
  } else {
    auto f = [&](double x) { return real_power(x, -z) * (mol.value(x) * std::cos(w * x)); };
    near = c * checked(integrate(f, 0.0, x1, kernel_options(0, mass)), "frequency side").value;
  }

  const double spacing = w > 0.0 ? std::min(2.0, std::numbers::pi / w) : 2.0;
  const int pieces = static_cast<int>(std::ceil((extent - x1) / spacing));
  std::vector<double> bp(pieces + 1);
  for (int i = 0; i <= pieces; ++i) bp[i] = x1 + (extent - x1) * i / pieces;
  auto g = [&](double x) { return real_power(x, -z) * (mol.value(x) * std::cos(w * x)); };
  const auto far = checked(integrate(g, std::span<const double>(bp), kernel_options(pieces, mass)), "frequency side");
  return prefactor * (near + c * far.value);
}

}  // namespace

Complex fractional_constant(Complex z) { return std::exp(-0.5 * z * std::numbers::ln2) * rgamma(0.5 * z); }

Complex fractional_kernel(Complex z, double s) {
  if (s == 0.0) throw DomainError("fractional_kernel: s must be non-zero");
  return fractional_constant(z) * real_power(std::abs(s), z - 1.0);
}

Complex I_z_eval(Complex z, double s) {
  if (!(z.real() > 0.0)) throw DomainError("I_z_eval: requires Re z > 0 (use smoothed_kernel_eval)");
  return fractional_kernel(z, s);
}

MollifierSpec::MollifierSpec(std::shared_ptr<const BumpTransformTable> table) : table_(std::move(table)) {
  if (!table_) throw DomainError("MollifierSpec: missing transform table");
}

double MollifierSpec::hat(double t) const { return eval_bump(CutoffSpec{}, 2.0 * t) / 1.5; }

double MollifierSpec::value_direct(double x) const { return BumpTransform::shared().value(0.5 * x) / (3.0 * kTwoPi); }

double MollifierSpec::value(double x) const { return table_->value(0.5 * x) / (3.0 * kTwoPi); }

double MollifierSpec::sup_norm() const { return value(0.0); }

double MollifierSpec::hat_integral() const {
  const double bp[] = {-1.0, -0.5, 0.5, 1.0};
  QuadOptions opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-14;
  return integrate([this](double t) { return hat(t); }, std::span<const double>(bp), opt).value;
}

std::shared_ptr<const MollifierSpec> MollifierSpec::shared() {
  static const auto instance = std::make_shared<const MollifierSpec>();
  return instance;
}

double mollifier_value(const MollifierSpec& spec, int N, double lambda) {
  if (N < 1) throw DomainError("mollifier_value: N must be >= 1");
  return spec.value(lambda / N);
}

void SmoothedKernel::validate() const {
  if (N < 1) throw DomainError("SmoothedKernel: N must be >= 1");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw DomainError("SmoothedKernel: z must be finite");
  if (z.real() > 1.0) throw DomainError("SmoothedKernel: requires Re z <= 1");
  if (!mollifier) throw DomainError("SmoothedKernel: missing mollifier");
}

Complex smoothed_kernel_eval(const SmoothedKernel& spec, double s) {
  spec.validate();
  if (!std::isfinite(s)) throw DomainError("smoothed_kernel_eval: s must be finite");
  switch (spec.path) {
    case KernelPath::space:
      return space_side(spec, s);
    case KernelPath::frequency:
      return frequency_side(spec, s);
    case KernelPath::automatic:
      break;
  }
  if (spec.z.real() > 0.0 || std::abs(s) * spec.N >= spec.N + 1.0) return space_side(spec, s);
  return frequency_side(spec, s);
}

Complex nu_conv_J(const GraphMeasure& gm, const SmoothedKernel& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                  double sigma) {
  const double density = eval_density(gm, x);
  if (density == 0.0) return 0.0;
  return density * smoothed_kernel_eval(spec, sigma - eval_phase(gm.phase, x));
}

}  // namespace hconv
