#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace polylap {

/// Spatial point; only the first `dim` entries of a Point are meaningful.
using Point = std::array<double, 3>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid input or unmet precondition. The CLI maps this to exit code 2.
struct PreconditionError : Error {
  using Error::Error;
};

struct ParseError : PreconditionError {
  std::size_t offset;
  ParseError(const std::string& what, std::size_t off)
      : PreconditionError(what), offset(off) {}
};

/// Numerical failure (quadrature breakdown, singular solve). CLI exit code 3.
struct NumericError : Error {
  using Error::Error;
};

inline double dot(const double* a, const double* b, int dim) {
  double s = 0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

inline double vec_norm(const double* x, int dim) {
  return std::sqrt(dot(x, x, dim));
}

/// b^e by repeated multiplication; exact on exactly-representable bases.
inline double ipow(double b, int e) {
  double r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace polylap
