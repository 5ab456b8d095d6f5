#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace bpcl {

using Complex = std::complex<double>;
using Point = std::array<double, 2>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class HypothesisError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Conjugate exponent; 1 <-> inf.
inline double conjugate(double p) {
  if (p == kInf) return 1.0;
  if (p == 1.0) return kInf;
  return p / (p - 1.0);
}

// Unimodular phase of z; the phase of zero is taken to be 1.
inline Complex phase(Complex z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : Complex(1.0, 0.0);
}

}  // namespace bpcl
