#include "polylap/kernel.hpp"

#include <cmath>

namespace polylap::kernel {

void KernelParams::validate() const {
  if (n < 1 || n > 3) throw PreconditionError("kernel: dimension must be 1, 2 or 3");
  if (!(s > 0.0 && s < 1.0)) throw PreconditionError("kernel: s must lie in (0,1)");
  if (k < 0 || k > 6) throw PreconditionError("kernel: order k must lie in 0..6");
}

double kernel_value(const KernelParams& p, const double* e, const double* z) {
  double d2 = 0;
  for (int i = 0; i < p.n; ++i) {
    double d = z[i] - e[i];
    d2 += d * d;
  }
  if (d2 == 0) throw PreconditionError("kernel: evaluation at the singularity");
  return std::pow(d2, -0.5 * (p.n + 2 * p.s));
}

poly::MultivariatePolynomial taylor_polynomial(const KernelParams& p, const double* e) {
  p.validate();
  double en = vec_norm(e, p.n);
  if (std::fabs(en - 1.0) > 1e-9)
    throw PreconditionError("kernel: expansion direction must be a unit vector");

  const int cap = p.k - 1;
  poly::MultivariatePolynomial acc(p.n, cap);
  if (cap < 0) return acc;

  // w = |z|^2 - 2<e,z>
  poly::MultivariatePolynomial w(p.n, 2);
  for (int i = 0; i < p.n; ++i) {
    poly::MultiIndex sq;
    sq.e[i] = 2;
    w.set_coeff(sq, 1.0);
    poly::MultiIndex lin;
    lin.e[i] = 1;
    if (e[i] != 0.0) w.set_coeff(lin, -2.0 * e[i]);
  }

  const double pexp = 0.5 * (p.n + 2 * p.s);
  poly::MultivariatePolynomial wpow(p.n, cap);  // w^m truncated
  poly::MultiIndex zero;
  wpow.set_coeff(zero, 1.0);
  double bin = 1.0;  // binom(-pexp, m)
  acc.set_coeff(zero, 1.0);
  for (int m = 1; m <= cap; ++m) {
    wpow = poly::multiply_truncated(wpow, w, cap);
    bin *= -(pexp + m - 1) / m;
    poly::MultivariatePolynomial term = wpow;
    term *= bin;
    acc += term;
  }
  return acc;
}

std::map<poly::MultiIndex, double> taylor_coefficients(const KernelParams& p,
                                                       const double* e) {
  return taylor_polynomial(p, e).coeffs();
}

double expansion_remainder(const KernelParams& p, const double* e, const double* z) {
  return kernel_value(p, e, z) - taylor_polynomial(p, e).eval(z);
}

double psi_with(const KernelParams& p, const poly::MultivariatePolynomial& taylor,
                const double* x, const double* y) {
  double t = vec_norm(y, p.n);
  if (t < 2.0 * (1 - 1e-12))
    throw PreconditionError("psi: |y| must be >= 2");
  double z[3] = {0, 0, 0}, e[3] = {0, 0, 0};
  for (int i = 0; i < p.n; ++i) {
    z[i] = x[i] / t;
    e[i] = y[i] / t;
  }
  double rem = kernel_value(p, e, z) - taylor.eval(z);
  return -ipow(t, p.k) * rem;
}

double psi(const KernelParams& p, const double* x, const double* y) {
  if (vec_norm(x, p.n) >= 1.0) throw PreconditionError("psi: |x| must be < 1");
  double t = vec_norm(y, p.n);
  double e[3] = {0, 0, 0};
  for (int i = 0; i < p.n; ++i) e[i] = y[i] / t;
  return psi_with(p, taylor_polynomial(p, e), x, y);
}

}  // namespace polylap::kernel
