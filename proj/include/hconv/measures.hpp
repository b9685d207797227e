#pragma once

// The singular measure nu carried by the graph {(w, phi(w))}: phase families,
// the concrete smooth cutoff, densities and the L^1 norm of the cutoff's
// Fourier transform.

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hconv/errors.hpp"

namespace hconv {

/// Concrete cutoff eta_j: 1 on [-1, 1], 0 outside (-2, 2), smooth and even.
/// `resolution` controls the numerical Fourier transform behind bump_hat_l1.
struct CutoffSpec {
  int resolution = 2;

  void validate() const {
    if (resolution < 1) throw DomainError("CutoffSpec: resolution must be >= 1");
  }
};

/// psi(u) / (psi(u) + psi(1 - u)) with psi(u) = exp(-1/u) for u > 0.
double smooth_step(double u);

double eval_bump(const CutoffSpec& c, double t);

/// Phase of the graph: quadratic sum_j a_j |w_j|^2, or power |w|^{2m}.
struct PhaseSpec {
  enum class Kind { quadratic, power };

  Kind kind = Kind::quadratic;
  Eigen::VectorXd a;  // quadratic coefficients, length n
  int m = 1;          // power exponent

  static PhaseSpec quadratic(Eigen::VectorXd coefficients);
  static PhaseSpec power(int exponent);

  void validate(int n) const;
};

double eval_phase(const PhaseSpec& phase, const Eigen::Ref<const Eigen::VectorXd>& w);

/// Gradient of the phase at w (length 2n).
Eigen::VectorXd phase_gradient(const PhaseSpec& phase, const Eigen::Ref<const Eigen::VectorXd>& w);

struct GraphMeasure {
  int n = 1;
  PhaseSpec phase;
  std::vector<CutoffSpec> cutoffs;  // n entries (quadratic) or 1 radial entry (power)

  static GraphMeasure quadratic(Eigen::VectorXd a, CutoffSpec cutoff = {});
  static GraphMeasure power(int n, int m, CutoffSpec cutoff = {});

  void validate() const;
};

/// eta(w): prod_j eta_j(|w_j|^2) in the quadratic case, eta_0(|w|^2) in the power case.
double eval_density(const GraphMeasure& gm, const Eigen::Ref<const Eigen::VectorXd>& w);

/// sup of |grad phi| over supp(eta), estimated on a sampling lattice.
double phase_gradient_sup(const GraphMeasure& gm, int samples_per_axis = 41);

/// Fourier transform of the cutoff, t -> integral eta(s) exp(-i s t) ds, for
/// the fixed plateau/support geometry. Node tables are built once.
class BumpTransform {
 public:
  explicit BumpTransform(int panels = 128, int order = 16);

  double value(double xi) const;
  /// d/dxi of value().
  double derivative(double xi) const;
  /// value() and derivative() from one pass over the nodes.
  std::pair<double, double> value_and_derivative(double xi) const;
  /// value() and derivative() at xi = i * step for i < count.
  void tabulate(double step, int count, std::vector<double>& values, std::vector<double>& slopes) const;

  static const BumpTransform& shared();

 private:
  std::vector<double> nodes_;
  std::vector<double> weighted_;  // weight * eta(node) on the transition [1, 2]
};

/// BumpTransform tabulated on [0, extent] with cubic Hermite interpolation
/// (exact nodal derivatives); evaluations beyond the table fall back to the
/// direct sum. Immutable after construction.
class BumpTransformTable {
 public:
  explicit BumpTransformTable(double step = 0.0125, double extent = 500.0);

  double value(double xi) const;
  double extent() const { return extent_; }

  static std::shared_ptr<const BumpTransformTable> shared();

 private:
  double step_;
  double extent_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

struct FourierL1 {
  double value = 0.0;
  double error = 0.0;
};

/// ||g^||_1 for an even function g supported in [-half_support, half_support],
/// integrating |g^| on [0, xi_max] with step xi_step and estimating the tail.
FourierL1 fourier_l1_norm_even(const std::function<double(double)>& g, double half_support, double xi_max,
                               double xi_step);

/// ||eta_j^||_1 of the concrete bump at the cutoff's resolution (cached).
FourierL1 bump_hat_l1(const CutoffSpec& c);

}  // namespace hconv
