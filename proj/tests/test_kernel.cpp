#include <cmath>
#include <random>

#include <doctest.h>

#include "polylap/kernel.hpp"

using namespace polylap;

namespace {

void random_direction(std::mt19937_64& rng, int n, double* e) {
  std::normal_distribution<double> N(0.0, 1.0);
  double nrm = 0;
  do {
    nrm = 0;
    for (int i = 0; i < n; ++i) {
      e[i] = N(rng);
      nrm += e[i] * e[i];
    }
    nrm = std::sqrt(nrm);
  } while (nrm < 1e-3);
  for (int i = 0; i < n; ++i) e[i] /= nrm;
  for (int i = n; i < 3; ++i) e[i] = 0;
}

}  // namespace

TEST_SUITE("kernel") {

TEST_CASE("constant coefficient is 1 for any direction") {
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 3}) {
    kernel::KernelParams p;
    p.n = n;
    p.s = 0.4;
    p.k = 1;
    double e[3];
    random_direction(rng, n, e);
    auto c = kernel::taylor_coefficients(p, e);
    poly::MultiIndex zero;
    REQUIRE(c.count(zero) == 1);
    CHECK(c.at(zero) == doctest::Approx(1.0));
  }
}

TEST_CASE("first-order coefficient in one dimension") {
  for (double s : {0.3, 0.5, 0.8}) {
    kernel::KernelParams p;
    p.n = 1;
    p.s = s;
    p.k = 2;
    double plus[3] = {1, 0, 0}, minus[3] = {-1, 0, 0};
    poly::MultiIndex i1;
    i1.e = {1, 0, 0};
    CHECK(kernel::taylor_coefficients(p, plus).at(i1) ==
          doctest::Approx(1.0 + 2.0 * s));
    CHECK(kernel::taylor_coefficients(p, minus).at(i1) ==
          doctest::Approx(-(1.0 + 2.0 * s)));
  }
}

TEST_CASE("coefficients match numerical derivatives") {
  kernel::KernelParams p;
  p.n = 2;
  p.s = 0.5;
  p.k = 3;
  std::mt19937_64 rng(23);
  double e[3];
  random_direction(rng, 2, e);
  auto c = kernel::taylor_coefficients(p, e);
  const double h = 1e-5;
  auto g = [&](double z0, double z1) {
    double z[3] = {z0, z1, 0};
    return kernel::kernel_value(p, e, z);
  };

  poly::MultiIndex d10, d01, d20, d11;
  d10.e = {1, 0, 0};
  d01.e = {0, 1, 0};
  d20.e = {2, 0, 0};
  d11.e = {1, 1, 0};
  CHECK(c.at(d10) == doctest::Approx((g(h, 0) - g(-h, 0)) / (2 * h)).epsilon(1e-6));
  CHECK(c.at(d01) == doctest::Approx((g(0, h) - g(0, -h)) / (2 * h)).epsilon(1e-6));
  // second order: divided by alpha! = 2
  CHECK(c.at(d20) ==
        doctest::Approx((g(h, 0) - 2 * g(0, 0) + g(-h, 0)) / (2 * h * h)).epsilon(1e-4));
  CHECK(c.at(d11) ==
        doctest::Approx((g(h, h) - g(h, -h) - g(-h, h) + g(-h, -h)) / (4 * h * h))
            .epsilon(1e-4));
}

TEST_CASE("expansion reconstructs the kernel to 1e-10") {
  std::mt19937_64 rng(37);
  for (int n : {1, 2}) {
    for (double s : {0.3, 0.5, 0.8}) {
      for (int k : {1, 2, 3}) {
        kernel::KernelParams p;
        p.n = n;
        p.s = s;
        p.k = k;
        for (int trial = 0; trial < 200; ++trial) {
          double e[3], z[3] = {0, 0, 0};
          random_direction(rng, n, e);
          double r2 = 0;
          for (int i = 0; i < n; ++i) {
            z[i] = (static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5);
            r2 += z[i] * z[i];
          }
          if (r2 > 0.25) {
            double f = 0.5 / std::sqrt(r2);
            for (int i = 0; i < n; ++i) z[i] *= f;
          }
          auto c = kernel::taylor_coefficients(p, e);
          double series = 0;
          for (const auto& [a, coef] : c) {
            double mono = 1;
            for (int i = 0; i < n; ++i) mono *= ipow(z[i], a.e[i]);
            series += coef * mono;
          }
          double recon = series + kernel::expansion_remainder(p, e, z);
          CHECK(std::fabs(kernel::kernel_value(p, e, z) - recon) <= 1e-10);
        }
      }
    }
  }
}

TEST_CASE("remainder decays like |z|^k") {
  kernel::KernelParams p;
  p.n = 2;
  p.s = 0.6;
  p.k = 2;
  kernel::KernelParams p3 = p;
  p3.k = 3;  // its coefficient list extends through degree 2
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    double e[3], z0[3];
    random_direction(rng, 2, e);
    random_direction(rng, 2, z0);
    auto deg2 = kernel::taylor_coefficients(p3, e);
    for (double t : {0.5, 0.25, 0.125}) {
      double z[3] = {t * z0[0], t * z0[1], 0};
      double rem = kernel::expansion_remainder(p, e, z);
      CHECK(std::fabs(rem) <= 50.0 * t * t);  // one uniform constant
      // leading term is the degree-2 Taylor block; what is left is O(t^3)
      double lead = 0;
      for (const auto& [a, c] : deg2)
        if (a.order() == 2) lead += c * ipow(z[0], a.e[0]) * ipow(z[1], a.e[1]);
      CHECK(std::fabs(rem - lead) <= 200.0 * t * t * t);
    }
  }
}

TEST_CASE("psi at the origin and the k=0 closed form") {
  kernel::KernelParams p;
  p.n = 1;
  p.s = 0.5;
  p.k = 2;
  double zero[3] = {0, 0, 0}, y[3] = {4, 0, 0};
  CHECK(kernel::psi(p, zero, y) == doctest::Approx(0.0));

  kernel::KernelParams p0 = p;
  p0.k = 0;
  double x[3] = {0.5, 0, 0};
  double expect = -std::pow(4.0, 1.0 + 2.0 * p0.s) /
                  std::pow(std::fabs(0.5 - 4.0), 1.0 + 2.0 * p0.s);
  CHECK(kernel::psi(p0, x, y) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("psi equals the scaled expansion remainder") {
  kernel::KernelParams p;
  p.n = 1;
  p.s = 0.5;
  p.k = 2;
  double x[3] = {0.5, 0, 0}, y[3] = {4, 0, 0};
  double e[3] = {1, 0, 0};
  double zx[3] = {0.5 / 4.0, 0, 0};
  auto c = kernel::taylor_coefficients(p, e);
  double series = 0;
  for (const auto& [a, coef] : c) series += coef * ipow(zx[0], a.e[0]);
  double expect = -ipow(4.0, p.k) * (kernel::kernel_value(p, e, zx) - series);
  CHECK(kernel::psi(p, x, y) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("psi stays bounded as |y| grows") {
  kernel::KernelParams p;
  p.n = 2;
  p.s = 0.5;
  p.k = 2;
  std::mt19937_64 rng(53);
  double first_max = 0, last_max = 0;
  for (double rho : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0}) {
    double m = 0;
    for (int trial = 0; trial < 8; ++trial) {
      double dir[3];
      random_direction(rng, 2, dir);
      double y[3] = {rho * dir[0], rho * dir[1], 0};
      for (double t : {0.25, 0.5, 0.75, 0.95}) {
        double x[3] = {t * 0.6, t * -0.8, 0};
        m = std::max(m, std::fabs(kernel::psi(p, x, y)));
      }
    }
    if (rho == 2.0) first_max = m;
    last_max = m;
  }
  CHECK(last_max <= 2.0 * first_max + 0.5);
}

TEST_CASE("parameter validation") {
  kernel::KernelParams bad;
  bad.n = 1;
  bad.s = 1.0;
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad.s = 0.5;
  bad.k = 7;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
  bad.k = 0;
  bad.n = 4;
  CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

}  // TEST_SUITE
