#pragma once

// Heisenberg group H^n realized as R^{2n} x R with the twisted product
//   (x, t) . (y, s) = (x + y, t + s + W(x, y) / 2),
// where W is the standard symplectic form. Coordinates are real; the complex
// picture C^n is only the identification x' + i x''.

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "hconv/errors.hpp"

namespace hconv {

template <typename Scalar>
using SpatialVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

inline void require_even_length(Eigen::Index size, const char* what) {
  if (size < 2 || size % 2 != 0) {
    throw DimensionError(std::string(what) + ": spatial vector must have length 2n with n >= 1, got " +
                         std::to_string(size));
  }
}

}  // namespace detail

/// W(x, y) = sum_j (y_{n+j} x_j - y_j x_{n+j}).
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar symplectic_form(const Eigen::MatrixBase<DerivedX>& x,
                                          const Eigen::MatrixBase<DerivedY>& y) {
  if (x.size() != y.size()) {
    throw DimensionError("symplectic_form: length mismatch (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
  }
  detail::require_even_length(x.size(), "symplectic_form");
  const Eigen::Index n = x.size() / 2;
  return x.head(n).dot(y.tail(n)) - y.head(n).dot(x.tail(n));
}

/// A point (x, t) of H^n.
template <typename Scalar = double>
struct HPoint {
  SpatialVector<Scalar> x;
  Scalar t{0};

  HPoint() = default;

  HPoint(SpatialVector<Scalar> x_in, Scalar t_in) : x(std::move(x_in)), t(t_in) {
    detail::require_even_length(x.size(), "HPoint");
    using std::isfinite;
    if (!isfinite(t) || !x.allFinite()) throw DomainError("HPoint: coordinates must be finite");
  }

  static HPoint identity(int n) { return HPoint(SpatialVector<Scalar>::Zero(2 * n), Scalar(0)); }

  int dim() const { return static_cast<int>(x.size() / 2); }
};

template <typename Scalar>
HPoint<Scalar> group_mul(const HPoint<Scalar>& p, const HPoint<Scalar>& q) {
  if (p.x.size() != q.x.size()) {
    throw DimensionError("group_mul: points live in different dimensions");
  }
  return HPoint<Scalar>(p.x + q.x, p.t + q.t + Scalar(0.5) * symplectic_form(p.x, q.x));
}

template <typename Scalar>
HPoint<Scalar> group_inv(const HPoint<Scalar>& p) {
  return HPoint<Scalar>(-p.x, -p.t);
}

template <typename Scalar>
HPoint<Scalar> operator*(const HPoint<Scalar>& p, const HPoint<Scalar>& q) {
  return group_mul(p, q);
}

/// Euclidean distance in R^{2n+1}; not a group-invariant metric.
template <typename Scalar>
Scalar euclidean_distance(const HPoint<Scalar>& p, const HPoint<Scalar>& q) {
  if (p.x.size() != q.x.size()) throw DimensionError("euclidean_distance: dimension mismatch");
  using std::sqrt;
  const Scalar dt = p.t - q.t;
  return sqrt((p.x - q.x).squaredNorm() + dt * dt);
}

template <typename Scalar>
Scalar euclidean_norm(const HPoint<Scalar>& p) {
  using std::sqrt;
  return sqrt(p.x.squaredNorm() + p.t * p.t);
}

}  // namespace hconv
