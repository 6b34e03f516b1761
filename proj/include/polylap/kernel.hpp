#pragma once

#include <map>

#include "polylap/common.hpp"
#include "polylap/poly.hpp"

namespace polylap::kernel {

struct KernelParams {
  int n = 1;     // ambient dimension, 1..3
  double s = 0.5;  // fractional order, in (0,1)
  int k = 0;     // renormalization order, 0..6

  void validate() const;
};

/// g_e(z) = |z - e|^{-(n+2s)} for a unit direction e.
double kernel_value(const KernelParams& p, const double* e, const double* z);

/// Taylor polynomial of g_e at z = 0 through degree k-1 (the zero polynomial
/// for k == 0). Computed exactly via the binomial series of (1+w)^{-(n+2s)/2}
/// with w = |z|^2 - 2<e,z>: the inner function is quadratic, so the chain
/// rule terminates and no numerical differentiation is involved.
poly::MultivariatePolynomial taylor_polynomial(const KernelParams& p, const double* e);

/// Coefficient map c_{alpha,e} for |alpha| <= k-1 (the coefficients of
/// taylor_polynomial).
std::map<poly::MultiIndex, double> taylor_coefficients(const KernelParams& p,
                                                       const double* e);

/// g_e(z) minus its degree-(k-1) Taylor polynomial.
double expansion_remainder(const KernelParams& p, const double* e, const double* z);

/// psi(x, y) = -|y|^k [ g_{y/|y|}(x/|y|) - T_{k-1}(x/|y|) ], the bounded
/// correction kernel. Preconditions: |x| < 1, |y| >= 2.
double psi(const KernelParams& p, const double* x, const double* y);

/// psi evaluated with a caller-supplied Taylor polynomial for the direction
/// y/|y| (lets quadrature loops reuse one expansion per ray).
double psi_with(const KernelParams& p, const poly::MultivariatePolynomial& taylor,
                const double* x, const double* y);

}  // namespace polylap::kernel
