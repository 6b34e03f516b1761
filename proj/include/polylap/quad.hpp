#pragma once

#include <functional>
#include <memory>

#include "polylap/common.hpp"
#include "polylap/expr.hpp"
#include "polylap/kernel.hpp"
#include "polylap/poly.hpp"

namespace polylap::quad {

/// Evaluatable scalar function with declared growth; adapts symbolic fields
/// (and mollified or otherwise wrapped functions) to the quadrature engine.
struct Field {
  int dim = 1;
  int growth = 0;  // declared: |u(y)| <= C (1 + |y|^growth)
  std::function<double(const double*)> f;

  double operator()(const double* x) const { return f(x); }
};

Field as_field(expr::ScalarField f);

enum class GrowthCheck {
  Enforce,  // divergent-tail preconditions throw PreconditionError
  Bypass    // diagnostics only: computations proceed, divergent tails -> NaN
};

struct QuadratureConfig {
  double delta = 0.25;        // near-field split radius
  int radial_nodes = 24;      // nodes of the near rule and per far panel
  int angular_nodes = 64;     // circle nodes for n=2 (n=1 and n=3 use fixed designs)
  double r_max = 1e4;         // radial truncation, completed by a power-law tail
  bool analytic_tail = true;
  double abs_tol = 1e-6;      // target absolute error of one operator evaluation
  GrowthCheck growth_check = GrowthCheck::Enforce;
};

/// Principal-value fractional Laplacian (no normalizing constant)
///   (-Lap)^s u(x) = pv int (u(x)-u(y)) |x-y|^{-n-2s} dy,
/// symmetrized second differences inside |y-x| < delta. Requires
/// growth < 2s so the far field converges (the only callers pass bounded or
/// compactly cut-off integrands).
double pv_fraclap(const Field& u, const Point& x, const kernel::KernelParams& kp,
                  const QuadratureConfig& cfg);

/// (-Lap)^s applied to the sharply cut-off function 1_{B_rho} u. The radial
/// integration splits exactly at the cutoff sphere along each ray, and the
/// outside contribution u(x) int_{|y|>rho} ... integrates in closed form, so
/// the indicator costs no smoothness. Pre: |x| < rho.
double indicator_fraclap(const Field& u, double rho, const Point& x,
                         const kernel::KernelParams& kp, const QuadratureConfig& cfg);

/// indicator_fraclap with the renormalization preconditions (rho >= 2).
double cutoff_laplacian(const Field& u, double R, const Point& x,
                        const kernel::KernelParams& kp, const QuadratureConfig& cfg);

/// int_{|y| >= r0} |u(y)| |y|^{-(n+2s+k)} dy. Pre: growth < 2s + k
/// (under Bypass a divergent case returns NaN instead of throwing).
double tail_integral(const Field& u, int k, double r0,
                     const kernel::KernelParams& kp, const QuadratureConfig& cfg);

/// int_{a <= |y| <= b} u(y) |x-y|^{-n-2s} dy for |x| < a (no singularity).
double ring_integral(const Field& u, double a, double b, const Point& x,
                     const kernel::KernelParams& kp, const QuadratureConfig& cfg);

/// int_{|y| >= a} u(y) psi(x,y) |y|^{-(n+2s+k)} dy for a >= 2; the bounded
/// correction tail. Pre: growth < 2s + k (NaN under Bypass when violated).
double psi_tail_integral(const Field& u, double a, const Point& x,
                         const kernel::KernelParams& kp, const QuadratureConfig& cfg);

/// Convolution of u with a normalized smooth bump supported in the ball of
/// radius `scale`, realized by a fixed tensor quadrature (so the result is a
/// smooth, deterministic Field; constants mollify to themselves exactly).
Field mollify(const Field& u, double scale, int nodes = 32);

/// The renormalized splitting of (-Lap)^s(1_{B_R} u) on an evaluation grid:
///   f1(x) = pv int_{B_2} (u(x)-u(y)) |x-y|^{-n-2s} dy
///   f2(x) = u(x) int_{B_2^c} |x-y|^{-n-2s} dy          (closed-form radially)
///   fstar(x) = int_{2<=|y|<=R} u(y) psi(x,y) |y|^{-(n+2s+k)} dy
///   P(x) = sum_{|alpha| <= k-1} kappa_alpha x^alpha
/// with f1+f2+fstar+P = (-Lap)^s(1_{B_R} u) on the grid.
struct Decomposition {
  poly::SampledFunction f1, f2, fstar;
  poly::MultivariatePolynomial P;

  poly::SampledFunction sum() const;  // f1 + f2 + fstar
};

Decomposition decompose(const Field& u, double R,
                        std::shared_ptr<const poly::Grid> grid,
                        const kernel::KernelParams& kp, const QuadratureConfig& cfg);

// Symbolic-field conveniences.
inline double pv_fraclap(const expr::ScalarField& u, const Point& x,
                         const kernel::KernelParams& kp, const QuadratureConfig& cfg) {
  return pv_fraclap(as_field(u), x, kp, cfg);
}
inline double cutoff_laplacian(const expr::ScalarField& u, double R, const Point& x,
                               const kernel::KernelParams& kp,
                               const QuadratureConfig& cfg) {
  return cutoff_laplacian(as_field(u), R, x, kp, cfg);
}
inline double tail_integral(const expr::ScalarField& u, int k, double r0,
                            const kernel::KernelParams& kp,
                            const QuadratureConfig& cfg) {
  return tail_integral(as_field(u), k, r0, kp, cfg);
}
inline Decomposition decompose(const expr::ScalarField& u, double R,
                               std::shared_ptr<const poly::Grid> grid,
                               const kernel::KernelParams& kp,
                               const QuadratureConfig& cfg) {
  return decompose(as_field(u), R, grid, kp, cfg);
}

}  // namespace polylap::quad
