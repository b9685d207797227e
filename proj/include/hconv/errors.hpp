#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace hconv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different ambient dimensions (or have malformed sizes).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain where the quantity is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Gamma-type function evaluated at a pole.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Result would overflow the representable range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Quadrature or truncation did not reach the requested tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what + " (achieved error estimate " + format(achieved) + ")"),
        achieved_(achieved) {}

  double achieved() const noexcept { return achieved_; }

 private:
  static std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }

  double achieved_;
};

/// A discretization is too coarse for the requested experiment.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (unknown key, bad value, malformed file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iteration produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written, or its contents are malformed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hconv
