#include "polylap/quad.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "parallel.hpp"

namespace polylap::quad {

namespace {

struct Rule {
  std::vector<double> x, w;
};

/// Gauss-Legendre nodes/weights on [-1,1], cached per node count.
const Rule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton from the Chebyshev-like initial guess; converges in a few steps.
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / dp;
      t -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int j = 2; j <= n; ++j) {
      double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (t * p1 - p0) / (t * t - 1.0);
    double wt = 2.0 / ((1.0 - t * t) * dp * dp);
    r.x[i] = -t;
    r.w[i] = wt;
    r.x[n - 1 - i] = t;
    r.w[n - 1 - i] = wt;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

/// Gauss rule for int_0^1 sigma^{-s} f(sigma) dsigma, cached per (n, s).
/// Golub-Welsch on the Jacobi weight (1+x)^{-s} over [-1,1], then the affine
/// map sigma = (1+x)/2 (weights pick up the factor 2^{s-1}).
const Rule& gauss_jacobi01(int n, double s) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, s);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const double a = 0.0, b = -s;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double denom = (2 * k + a + b) * (2 * k + a + b + 2);
    J(k, k) = k == 0 ? (b - a) / (a + b + 2) : (b * b - a * a) / denom;
    if (k >= 1) {
      double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
      double den = (2 * k + a + b) * (2 * k + a + b);
      double beta = num / (den * (2 * k + a + b + 1) * (2 * k + a + b - 1));
      J(k, k - 1) = J(k - 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw NumericError("quadrature: Jacobi eigenproblem failed");

  const double mu0 = std::pow(2.0, 1.0 - s) / (1.0 - s);  // int (1+x)^{-s} dx
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    r.x[i] = 0.5 * (1.0 + es.eigenvalues()(i));
    double v0 = es.eigenvectors()(0, i);
    r.w[i] = mu0 * v0 * v0 * std::pow(2.0, s - 1.0);
  }
  return cache.emplace(key, std::move(r)).first->second;
}

struct AngularNode {
  Point e{0, 0, 0};
  double w = 0;
};

/// Quadrature designs for the unit sphere: sum of w_j f(e_j) approximates
/// the surface integral (exactly, for n=1). n=3 uses the classical 26-point
/// octahedral design (exact through degree 7).
std::vector<AngularNode> angular_design(int n, int angular_nodes) {
  std::vector<AngularNode> out;
  if (n == 1) {
    out.push_back({{1, 0, 0}, 1.0});
    out.push_back({{-1, 0, 0}, 1.0});
    return out;
  }
  if (n == 2) {
    int m = std::max(4, angular_nodes);
    out.reserve(m);
    for (int j = 0; j < m; ++j) {
      double th = 2.0 * M_PI * (j + 0.5) / m;  // offset keeps nodes off the axes
      out.push_back({{std::cos(th), std::sin(th), 0}, 2.0 * M_PI / m});
    }
    return out;
  }
  const double four_pi = 4.0 * M_PI;
  const double a1 = four_pi / 21.0;
  const double a2 = four_pi * 4.0 / 105.0;
  const double a3 = four_pi * 9.0 / 280.0;
  for (int ax = 0; ax < 3; ++ax)
    for (int sg = -1; sg <= 1; sg += 2) {
      AngularNode nd;
      nd.e[ax] = sg;
      nd.w = a1;
      out.push_back(nd);
    }
  const double r2 = 1.0 / std::sqrt(2.0);
  for (int ax = 0; ax < 3; ++ax)  // ax is the zero coordinate
    for (int s1 = -1; s1 <= 1; s1 += 2)
      for (int s2 = -1; s2 <= 1; s2 += 2) {
        AngularNode nd;
        nd.e[(ax + 1) % 3] = s1 * r2;
        nd.e[(ax + 2) % 3] = s2 * r2;
        nd.w = a2;
        out.push_back(nd);
      }
  const double r3 = 1.0 / std::sqrt(3.0);
  for (int s1 = -1; s1 <= 1; s1 += 2)
    for (int s2 = -1; s2 <= 1; s2 += 2)
      for (int s3 = -1; s3 <= 1; s3 += 2)
        out.push_back({{s1 * r3, s2 * r3, s3 * r3}, a3});
  return out;
}

template <class F>
double panel(double lo, double hi, const Rule& gl, F&& f) {
  double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double acc = 0;
  for (std::size_t i = 0; i < gl.x.size(); ++i)
    acc += gl.w[i] * f(mid + half * gl.x[i]);
  return acc * half;
}

/// int_a^b f, with octave-wide panels so power-law integrands keep a fixed
/// node density per decade.
template <class F>
double geometric_panels(double a, double b, const Rule& gl, F&& f) {
  if (!(a > 0)) throw PreconditionError("quadrature: panel start must be positive");
  double total = 0, lo = a;
  while (lo < b) {
    double hi = std::min(2.0 * lo, b);
    total += panel(lo, hi, gl, f);
    lo = hi;
  }
  return total;
}

inline void ray_point(const Point& x, double t, const Point& e, int n, double* y) {
  for (int i = 0; i < n; ++i) y[i] = x[i] + t * e[i];
}

/// Symmetrized near-field integral
///   1/2 int_{|z|<delta} (2u(x) - u(x+z) - u(x-z)) |z|^{-n-2s} dz
/// via r = delta*sqrt(sigma): the second difference is even in r, so
/// H(delta*sqrt(sigma))/sigma is smooth and the sigma^{-s} weight carries
/// the whole singularity.
double near_field(const Field& u, const Point& x, double delta,
                  const kernel::KernelParams& kp,
                  const std::vector<AngularNode>& dirs, const Rule& gj) {
  const double u0 = u(x.data());
  double total = 0;
  double y[3];
  for (const auto& d : dirs) {
    double acc = 0;
    for (std::size_t i = 0; i < gj.x.size(); ++i) {
      double sig = gj.x[i];
      double r = delta * std::sqrt(sig);
      ray_point(x, r, d.e, kp.n, y);
      double up = u(y);
      ray_point(x, -r, d.e, kp.n, y);
      double um = u(y);
      acc += gj.w[i] * (2.0 * u0 - up - um) / sig;
    }
    total += d.w * acc;
  }
  return 0.25 * std::pow(delta, -2.0 * kp.s) * total;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace

Field as_field(expr::ScalarField f) {
  Field out;
  out.dim = f.dimension();
  out.growth = f.growth_order();
  auto held = std::make_shared<expr::ScalarField>(std::move(f));
  out.f = [held](const double* x) { return (*held)(x); };
  return out;
}

double pv_fraclap(const Field& u, const Point& x, const kernel::KernelParams& kp,
                  const QuadratureConfig& cfg) {
  kp.validate();
  if (u.dim != kp.n)
    throw PreconditionError("pv: field dimension does not match kernel dimension");
  if (!(u.growth < 2.0 * kp.s)) {
    if (cfg.growth_check == GrowthCheck::Enforce)
      throw PreconditionError("pv: far field diverges under the declared growth");
    return nan_value();
  }

  const auto dirs = angular_design(kp.n, cfg.angular_nodes);
  const Rule& gl = gauss_legendre(cfg.radial_nodes);
  const Rule& gj = gauss_jacobi01(cfg.radial_nodes, kp.s);
  const double u0 = u(x.data());
  const double ex = -1.0 - 2.0 * kp.s;
  const double T = std::max(cfg.r_max, cfg.delta);

  double far = 0;
  double y[3];
  for (const auto& d : dirs) {
    auto f = [&](double t) {
      ray_point(x, t, d.e, kp.n, y);
      return (u0 - u(y)) * std::pow(t, ex);
    };
    double seg = geometric_panels(cfg.delta, T, gl, f);
    double tail = u0 * std::pow(T, -2.0 * kp.s) / (2.0 * kp.s);
    if (cfg.analytic_tail) {
      // model u(x+t e) ~ c t^growth beyond T and integrate the model exactly
      ray_point(x, T, d.e, kp.n, y);
      double ft = u(y) * std::pow(T, ex);
      tail -= ft * T / (2.0 * kp.s - u.growth);
    }
    far += d.w * (seg + tail);
  }
  return near_field(u, x, cfg.delta, kp, dirs, gj) + far;
}

double indicator_fraclap(const Field& u, double rho, const Point& x,
                         const kernel::KernelParams& kp, const QuadratureConfig& cfg) {
  kp.validate();
  if (u.dim != kp.n)
    throw PreconditionError("cutoff: field dimension does not match kernel dimension");
  const double xn = vec_norm(x.data(), kp.n);
  if (!(xn < rho))
    throw PreconditionError("cutoff: evaluation point must lie inside the cutoff ball");

  const auto dirs = angular_design(kp.n, cfg.angular_nodes);
  const Rule& gl = gauss_legendre(cfg.radial_nodes);
  const double delta_eff = std::min(cfg.delta, 0.5 * (rho - xn));
  const Rule& gj = gauss_jacobi01(cfg.radial_nodes, kp.s);
  const double u0 = u(x.data());
  const double ex = -1.0 - 2.0 * kp.s;

  double far = 0;
  double y[3];
  for (const auto& d : dirs) {
    // exact exit radius of the ray x + t e from B_rho
    double c = dot(x.data(), d.e.data(), kp.n);
    double tstar = -c + std::sqrt(rho * rho - xn * xn + c * c);
    auto f = [&](double t) {
      ray_point(x, t, d.e, kp.n, y);
      return (u0 - u(y)) * std::pow(t, ex);
    };
    double seg = geometric_panels(delta_eff, tstar, gl, f);
    // outside the ball the integrand is u(x) |x-y|^{-n-2s} with closed form
    double tail = u0 * std::pow(tstar, -2.0 * kp.s) / (2.0 * kp.s);
    far += d.w * (seg + tail);
  }
  return near_field(u, x, delta_eff, kp, dirs, gj) + far;
}

double cutoff_laplacian(const Field& u, double R, const Point& x,
                        const kernel::KernelParams& kp, const QuadratureConfig& cfg) {
  if (!(R >= 2.0))
    throw PreconditionError("cutoff: radius must be >= 2");
  return indicator_fraclap(u, R, x, kp, cfg);
}

double tail_integral(const Field& u, int k, double r0,
                     const kernel::KernelParams& kp, const QuadratureConfig& cfg) {
  kp.validate();
  if (k < 0) throw PreconditionError("tail: order must be a natural number");
  if (!(r0 > 0)) throw PreconditionError("tail: start radius must be positive");
  if (!(u.growth < 2.0 * kp.s + k)) {
    if (cfg.growth_check == GrowthCheck::Enforce)
      throw PreconditionError("tail: integral diverges under the declared growth");
    return nan_value();
  }

  const auto dirs = angular_design(kp.n, cfg.angular_nodes);
  const Rule& gl = gauss_legendre(cfg.radial_nodes);
  const double ex = -1.0 - 2.0 * kp.s - k;
  const double T = std::max(cfg.r_max, r0);
  const double qm1 = 2.0 * kp.s + k - u.growth;

  double total = 0;
  double y[3];
  for (const auto& d : dirs) {
    auto f = [&](double t) {
      for (int i = 0; i < kp.n; ++i) y[i] = t * d.e[i];
      return std::fabs(u(y)) * std::pow(t, ex);
    };
    double seg = geometric_panels(r0, T, gl, f);
    double tail = 0;
    if (cfg.analytic_tail) tail = f(T) * T / qm1;
    total += d.w * (seg + tail);
  }
  return total;
}

double ring_integral(const Field& u, double a, double b, const Point& x,
                     const kernel::KernelParams& kp, const QuadratureConfig& cfg) {
  kp.validate();
  if (!(a > 0)) throw PreconditionError("ring: inner radius must be positive");
  if (!(vec_norm(x.data(), kp.n) < a))
    throw PreconditionError("ring: evaluation point must lie inside the inner sphere");
  if (b <= a) return 0.0;

  const auto dirs = angular_design(kp.n, cfg.angular_nodes);
  const Rule& gl = gauss_legendre(cfg.radial_nodes);
  const double p = -0.5 * (kp.n + 2.0 * kp.s);

  double total = 0;
  double y[3];
  for (const auto& d : dirs) {
    auto f = [&](double t) {
      double d2 = 0;
      for (int i = 0; i < kp.n; ++i) {
        y[i] = t * d.e[i];
        double dd = x[i] - y[i];
        d2 += dd * dd;
      }
      return u(y) * std::pow(d2, p) * ipow(t, kp.n - 1);
    };
    total += d.w * geometric_panels(a, b, gl, f);
  }
  return total;
}

double psi_tail_integral(const Field& u, double a, const Point& x,
                         const kernel::KernelParams& kp, const QuadratureConfig& cfg) {
  kp.validate();
  if (!(a >= 2.0)) throw PreconditionError("psi tail: start radius must be >= 2");
  if (!(vec_norm(x.data(), kp.n) < a))
    throw PreconditionError("psi tail: evaluation point must lie inside the inner sphere");
  if (!(u.growth < 2.0 * kp.s + kp.k)) {
    if (cfg.growth_check == GrowthCheck::Enforce)
      throw PreconditionError("psi tail: integral diverges under the declared growth");
    return nan_value();
  }

  const auto dirs = angular_design(kp.n, cfg.angular_nodes);
  const Rule& gl = gauss_legendre(cfg.radial_nodes);
  const double ex = -1.0 - 2.0 * kp.s - kp.k;
  const double T = std::max(cfg.r_max, a);
  const double qm1 = 2.0 * kp.s + kp.k - u.growth;

  double total = 0;
  double y[3];
  for (const auto& d : dirs) {
    auto taylor = kernel::taylor_polynomial(kp, d.e.data());
    auto f = [&](double t) {
      for (int i = 0; i < kp.n; ++i) y[i] = t * d.e[i];
      return u(y) * kernel::psi_with(kp, taylor, x.data(), y) * std::pow(t, ex);
    };
    double seg = geometric_panels(a, T, gl, f);
    double tail = 0;
    if (cfg.analytic_tail) tail = f(T) * T / qm1;  // psi has a finite radial limit
    total += d.w * (seg + tail);
  }
  return total;
}

Field mollify(const Field& u, double scale, int nodes) {
  if (!(scale > 0)) throw PreconditionError("mollify: scale must be positive");
  if (nodes < 4) throw PreconditionError("mollify: needs at least 4 nodes per axis");
  const Rule& gl = gauss_legendre(nodes);
  const int n = u.dim;

  struct MNode {
    double z[3];
    double w;
  };
  auto state = std::make_shared<std::vector<MNode>>();
  double total = 0;
  std::vector<int> t(n, 0);
  while (true) {
    MNode nd{{0, 0, 0}, 1.0};
    double r2 = 0;
    for (int a = 0; a < n; ++a) {
      nd.z[a] = gl.x[t[a]];
      nd.w *= gl.w[t[a]];
      r2 += nd.z[a] * nd.z[a];
    }
    if (r2 < 1.0) {
      nd.w *= std::exp(-1.0 / (1.0 - r2));
      total += nd.w;
      state->push_back(nd);
    }
    int pos = n - 1;
    while (pos >= 0 && t[pos] == nodes - 1) t[pos--] = 0;
    if (pos < 0) break;
    ++t[pos];
  }
  // normalize by the same rule, so mollification preserves constants exactly
  for (auto& nd : *state) nd.w /= total;

  Field out;
  out.dim = n;
  out.growth = u.growth;
  auto base = std::make_shared<Field>(u);
  out.f = [state, base, scale, n](const double* x) {
    double acc = 0;
    double y[3];
    for (const auto& nd : *state) {
      for (int a = 0; a < n; ++a) y[a] = x[a] - scale * nd.z[a];
      acc += nd.w * base->f(y);
    }
    return acc;
  };
  return out;
}

poly::SampledFunction Decomposition::sum() const {
  poly::SampledFunction out = f1;
  out += f2;
  out += fstar;
  return out;
}

Decomposition decompose(const Field& u, double R,
                        std::shared_ptr<const poly::Grid> grid,
                        const kernel::KernelParams& kp, const QuadratureConfig& cfg) {
  kp.validate();
  if (u.dim != kp.n || grid->dim != kp.n)
    throw PreconditionError("decompose: dimension mismatch");
  if (!(R >= 2.0)) throw PreconditionError("decompose: cutoff radius must be >= 2");
  if (!(grid->radius < 2.0))
    throw PreconditionError("decompose: evaluation grid must sit inside the ball of radius 2");

  const auto dirs = angular_design(kp.n, cfg.angular_nodes);
  const Rule& gl = gauss_legendre(cfg.radial_nodes);
  const Rule& gj = gauss_jacobi01(cfg.radial_nodes, kp.s);
  const double two_s = 2.0 * kp.s;
  const double ex1 = -1.0 - two_s;

  // Shared radial nodes over the ring 2 <= |y| <= R (panels of [2, R] with
  // the Gauss-Legendre rule unrolled), so each direction samples u once.
  std::vector<double> rt, rv;
  {
    double lo = 2.0;
    while (lo < R) {
      double hi = std::min(2.0 * lo, R);
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < gl.x.size(); ++i) {
        rt.push_back(mid + half * gl.x[i]);
        rv.push_back(half * gl.w[i]);
      }
      lo = hi;
    }
  }
  const std::size_t nr = rt.size();

  struct DirData {
    poly::MultivariatePolynomial taylor;
    std::vector<double> uval;   // u at the ring nodes along this direction
    std::vector<double> kstar;  // rv * t^{-1-2s-k} at the ring nodes
  };
  std::vector<DirData> dd(dirs.size());
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    dd[j].taylor = kernel::taylor_polynomial(kp, dirs[j].e.data());
    dd[j].uval.resize(nr);
    dd[j].kstar.resize(nr);
    double y[3];
    for (std::size_t i = 0; i < nr; ++i) {
      for (int c = 0; c < kp.n; ++c) y[c] = rt[i] * dirs[j].e[c];
      dd[j].uval[i] = u(y);
      dd[j].kstar[i] = rv[i] * std::pow(rt[i], ex1 - kp.k);
    }
  }

  // kappa_alpha = -sum_dir w c_{alpha,e} int_2^R u(t e) t^{-1-2s-|alpha|} dt;
  // the radial moment depends on |alpha| only.
  poly::MultivariatePolynomial P(kp.n, kp.k - 1);
  const auto alphas = poly::multi_indices(kp.n, kp.k - 1);
  if (!alphas.empty()) {
    std::vector<std::vector<double>> mom(dirs.size(),
                                         std::vector<double>(kp.k, 0.0));
    for (std::size_t j = 0; j < dirs.size(); ++j)
      for (int m = 0; m < kp.k; ++m) {
        double acc = 0;
        for (std::size_t i = 0; i < nr; ++i)
          acc += rv[i] * dd[j].uval[i] * std::pow(rt[i], ex1 - m);
        mom[j][m] = acc;
      }
    for (const auto& al : alphas) {
      double kappa = 0;
      for (std::size_t j = 0; j < dirs.size(); ++j)
        kappa -= dirs[j].w * dd[j].taylor.coeff(al) * mom[j][al.order()];
      P.set_coeff(al, kappa);
    }
  }

  Decomposition out{poly::SampledFunction::zeros(grid),
                    poly::SampledFunction::zeros(grid),
                    poly::SampledFunction::zeros(grid), P};

  detail::parallel_for(grid->pts.size(), [&](std::size_t pidx) {
    const Point& x = grid->pts[pidx];
    const double xn = vec_norm(x.data(), kp.n);
    const double u0 = u(x.data());
    const double delta_eff = std::min(cfg.delta, 0.5 * (2.0 - xn));

    double far1 = 0, f2v = 0, fs = 0;
    double y[3];
    for (std::size_t j = 0; j < dirs.size(); ++j) {
      const auto& d = dirs[j];
      double c = dot(x.data(), d.e.data(), kp.n);
      double tstar = -c + std::sqrt(4.0 - xn * xn + c * c);
      auto f = [&](double t) {
        ray_point(x, t, d.e, kp.n, y);
        return (u0 - u(y)) * std::pow(t, ex1);
      };
      far1 += d.w * geometric_panels(delta_eff, tstar, gl, f);
      f2v += d.w * std::pow(tstar, -two_s) / two_s;

      double acc = 0;
      for (std::size_t i = 0; i < nr; ++i) {
        for (int cc = 0; cc < kp.n; ++cc) y[cc] = rt[i] * d.e[cc];
        acc += dd[j].kstar[i] * dd[j].uval[i] *
               kernel::psi_with(kp, dd[j].taylor, x.data(), y);
      }
      fs += d.w * acc;
    }
    out.f1.values[pidx] =
        near_field(u, x, delta_eff, kp, dirs, gj) + far1;
    out.f2.values[pidx] = u0 * f2v;
    out.fstar.values[pidx] = fs;
  });
  return out;
}

}  // namespace polylap::quad
