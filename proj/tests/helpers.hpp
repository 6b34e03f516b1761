#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "polylap/quad.hpp"

namespace testutil {

// Smooth bump supported in the unit ball; C-infinity, growth 0.
inline polylap::quad::Field bump_field(int dim = 1) {
  polylap::quad::Field f;
  f.dim = dim;
  f.growth = 0;
  f.f = [dim](const double* x) {
    double r2 = 0;
    for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
  };
  return f;
}

inline polylap::quad::Field translate1d(const polylap::quad::Field& u, double h) {
  polylap::quad::Field g = u;
  auto base = u.f;
  g.f = [base, h](const double* x) {
    double y[3] = {x[0] + h, 0, 0};
    return base(y);
  };
  return g;
}

// Adaptive Simpson for independent one-dimensional oracles.
inline double simpson(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol, int depth = 24) {
  double c = 0.5 * (a + b);
  double whole = simpson(f, a, b);
  double left = simpson(f, a, c), right = simpson(f, c, b);
  if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, c, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, c, b, 0.5 * tol, depth - 1);
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(g() >> 11) * 0x1.0p-53);
}

}  // namespace testutil
