#pragma once

// The analytic family of fractional kernels
//   I_z(s) = 2^{-z/2} / Gamma(z/2) |s|^{z-1},
// the band-limited mollifier H with phi_N(t) = H(t / N), and the smoothed
// kernel K_{N,z} = I_z * phi_N^ evaluated either in space or in frequency.
//
// Under the library convention g^(xi) = integral g(s) e^{-i s xi} ds one has
// (I_z)^ = sqrt(2 pi) I_{1-z}, and I_0 = delta exactly.

#include <memory>
#include <vector>

#include <Eigen/Core>

#include "hconv/measures.hpp"
#include "hconv/specfun.hpp"

namespace hconv {

/// 2^{-z/2} / Gamma(z/2); entire in z, zero on -2N and at 0.
Complex fractional_constant(Complex z);

/// Pointwise value of I_z away from the origin, for any z (the analytic
/// continuation agrees with this off s = 0).
Complex fractional_kernel(Complex z, double s);

/// I_z(s) in the region where it is a locally integrable function.
/// Throws DomainError when Re z <= 0 or s == 0.
Complex I_z_eval(Complex z, double s);

/// H with H^(t) = eta(2t) / 1.5, so supp H^ = (-1, 1), integral H^ = 1 and
/// H(x) = eta^(x/2) / (6 pi), read from a tabulated eta^.
class MollifierSpec {
 public:
  explicit MollifierSpec(std::shared_ptr<const BumpTransformTable> table = BumpTransformTable::shared());

  /// H^(t).
  double hat(double t) const;
  /// H(x) from the table (direct transform beyond it).
  double value(double x) const;
  /// H(x) by direct evaluation of the cutoff transform.
  double value_direct(double x) const;
  /// ||H||_inf = H(0) = 1 / (2 pi).
  double sup_norm() const;
  /// Numerical integral of H^ over (-1, 1).
  double hat_integral() const;
  /// Beyond this |x| the table is not used.
  double table_extent() const { return 2.0 * table_->extent(); }

  static std::shared_ptr<const MollifierSpec> shared();

 private:
  std::shared_ptr<const BumpTransformTable> table_;
};

/// phi_N(lambda) = H(lambda / N).
double mollifier_value(const MollifierSpec& spec, int N, double lambda);

enum class KernelPath {
  automatic,  // space side for Re z > 0 or |s| >= (N+1)/N, frequency side otherwise
  space,      // c_z integral |s - v/N|^{z-1} H^(v) dv
  frequency,  // inverse transform of sqrt(2 pi) I_{1-z} (2 pi) phi_N
};

struct SmoothedKernel {
  Complex z{0.0, 0.0};
  int N = 1;
  KernelPath path = KernelPath::automatic;
  std::shared_ptr<const MollifierSpec> mollifier = MollifierSpec::shared();

  void validate() const;
};

/// (I_z * phi_N^)(s). Throws DomainError when the forced path is undefined at
/// (z, s), AccuracyError when quadrature fails.
Complex smoothed_kernel_eval(const SmoothedKernel& spec, double s);

/// (nu * J_{N,z})(x, sigma) = eta(x) (I_z * phi_N^)(sigma - phi(x)).
Complex nu_conv_J(const GraphMeasure& gm, const SmoothedKernel& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                  double sigma);

}  // namespace hconv
