#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include <doctest.h>

#include "polylap/poly.hpp"

using namespace polylap;

namespace {

poly::SampledFunction sample_fn(std::shared_ptr<const poly::Grid> g,
                                double (*f)(double)) {
  return poly::SampledFunction::sample(g, [f](const double* x) { return f(x[0]); });
}

}  // namespace

TEST_SUITE("poly") {

TEST_CASE("gram matrix closed forms, n=1 degree 1") {
  auto G = poly::gram_matrix(1, 1);
  REQUIRE(G.rows() == 2);
  CHECK(G(0, 0) == doctest::Approx(2.0));
  CHECK(G(0, 1) == doctest::Approx(0.0));
  CHECK(G(1, 1) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("ball monomial integrals") {
  poly::MultiIndex odd;
  odd.e = {1, 2, 0};
  CHECK(poly::ball_monomial_integral(2, odd) == 0.0);
  poly::MultiIndex x2;
  x2.e = {2, 0, 0};
  // over the unit disc: integral of x^2 = pi/4
  CHECK(poly::ball_monomial_integral(2, x2) ==
        doctest::Approx(std::acos(-1.0) / 4.0));
  poly::MultiIndex one;
  CHECK(poly::ball_monomial_integral(1, one) == doctest::Approx(2.0));
}

TEST_CASE("multi index enumeration is canonical and complete") {
  auto idx = poly::multi_indices(2, 2);
  CHECK(idx.size() == 6);  // 1, x2, x1, x2^2, x1x2, x1^2
  for (std::size_t i = 1; i < idx.size(); ++i) CHECK(idx[i - 1] < idx[i]);
  CHECK(poly::multi_indices(1, -1).empty());
  CHECK(poly::multi_indices(3, 1).size() == 4);
}

TEST_CASE("sharp representative examples") {
  auto g = poly::default_unit_grid(1);

  auto xs = sample_fn(g, [](double x) { return x; });
  auto r1 = poly::sharp_representative(xs, 2);
  CHECK(r1.sharp.sup_norm() <= 1e-10);

  auto x3 = sample_fn(g, [](double x) { return x * x * x; });
  auto r2 = poly::sharp_representative(x3, 1);
  CHECK((r2.sharp - x3).sup_norm() <= 1e-12);  // odd: already mean-free

  auto x2 = sample_fn(g, [](double x) { return x * x; });
  auto r3 = poly::sharp_representative(x2, 1);
  // continuum mean of x^2 over (-1,1) is 1/3; grid quadrature is close
  double worst = 0;
  for (std::size_t i = 0; i < g->pts.size(); ++i) {
    double want = g->pts[i][0] * g->pts[i][0] - 1.0 / 3.0;
    worst = std::max(worst, std::fabs(r3.sharp.values[i] - want));
  }
  CHECK(worst <= 2e-3);
}

TEST_CASE("sharp representative invariants") {
  auto g = poly::default_unit_grid(1);
  auto f = sample_fn(g, [](double x) { return std::exp(x) + 0.5 * x * x; });

  auto r = poly::sharp_representative(f, 2);
  // idempotence
  auto r2 = poly::sharp_representative(r.sharp, 2);
  CHECK((r2.sharp - r.sharp).sup_norm() <= 1e-11);
  for (const auto& [a, c] : r2.shift.coeffs()) CHECK(std::fabs(c) <= 1e-11);

  // shift covariance: adding an affine function does not move the sharp part
  auto shifted = poly::SampledFunction::sample(
      g, [](const double* x) { return std::exp(x[0]) + 0.5 * x[0] * x[0] + 3.0 * x[0] - 7.0; });
  auto rs = poly::sharp_representative(shifted, 2);
  CHECK((rs.sharp - r.sharp).sup_norm() <= 1e-10);

  // discrete orthogonality to the modulus basis
  for (const auto& a : poly::multi_indices(1, 1)) {
    double ip = 0, nrm = 0;
    for (std::size_t i = 0; i < g->pts.size(); ++i) {
      double mono = std::pow(g->pts[i][0], a.e[0]);
      ip += g->w[i] * r.sharp.values[i] * mono;
      nrm += g->w[i] * r.sharp.values[i] * r.sharp.values[i];
    }
    CHECK(std::fabs(ip) <= 1e-8 * std::max(1.0, std::sqrt(nrm)));
  }
}

TEST_CASE("projection contracts distances on samples") {
  auto g = poly::default_unit_grid(1);
  auto f = sample_fn(g, [](double x) { return std::sin(3 * x); });
  auto h = sample_fn(g, [](double x) { return x * x * x - x; });
  auto fs = poly::sharp_representative(f, 2).sharp;
  auto hs = poly::sharp_representative(h, 2).sharp;
  CHECK((f - h).weighted_l2_norm() >= (fs - hs).weighted_l2_norm() - 1e-12);
}

TEST_CASE("polynomial limit detection") {
  auto g = poly::default_unit_grid(1);

  // far along the sequence the coefficients are Cauchy within tol
  std::vector<poly::SampledFunction> far;
  for (int j = 3000; j < 3005; ++j)
    far.push_back(poly::SampledFunction::sample(
        g, [j](const double* x) { return (1.0 + 1.0 / j) * x[0]; }));
  auto fit = poly::fit_polynomial_limit(far, 1, 1e-6);
  REQUIRE(fit.has_value());
  poly::MultiIndex x1;
  x1.e = {1, 0, 0};
  CHECK(fit->coeff(x1) == doctest::Approx(1.0).epsilon(1e-3));

  // early on the coefficient gaps (~1/j^2) exceed the tolerance
  std::vector<poly::SampledFunction> near;
  for (int j = 1; j < 6; ++j)
    near.push_back(poly::SampledFunction::sample(
        g, [j](const double* x) { return (1.0 + 1.0 / j) * x[0]; }));
  CHECK_FALSE(poly::fit_polynomial_limit(near, 1, 1e-6).has_value());

  // constant zero sequence fits the zero polynomial
  std::vector<poly::SampledFunction> zs(4, poly::SampledFunction::zeros(g));
  auto zfit = poly::fit_polynomial_limit(zs, 0, 1e-6);
  REQUIRE(zfit.has_value());
  CHECK(zfit->degree() == -1);

  // sin(5x) is not affine to 1e-3
  std::vector<poly::SampledFunction> sines(
      3, sample_fn(g, [](double x) { return std::sin(5 * x); }));
  CHECK_FALSE(poly::fit_polynomial_limit(sines, 1, 1e-3).has_value());
}

TEST_CASE("class equality") {
  auto g = poly::default_unit_grid(1);
  auto a = sample_fn(g, [](double x) { return x * x; });
  auto b = poly::SampledFunction::sample(
      g, [](const double* x) { return x[0] * x[0] + 3.0 * x[0] + 1.0; });
  auto c = sample_fn(g, [](double x) { return 2 * x * x; });
  CHECK(poly::class_equal(a, a, 2, 1e-6));
  CHECK(poly::class_equal(a, b, 2, 1e-6));
  CHECK_FALSE(poly::class_equal(a, c, 2, 1e-6));
}

TEST_CASE("grid over the closed ball") {
  auto g = poly::Grid::ball(2, 21, 0.9);
  double wsum = 0;
  for (std::size_t i = 0; i < g->pts.size(); ++i) {
    CHECK(std::hypot(g->pts[i][0], g->pts[i][1]) <= 0.9 + 1e-12);
    wsum += g->w[i];
  }
  // weights approximate the disc area
  CHECK(wsum == doctest::Approx(std::acos(-1.0) * 0.81).epsilon(0.04));
  CHECK(g->spacing() == doctest::Approx(1.8 / 20.0));
}

TEST_CASE("csv round trip at 17 significant digits") {
  auto g = poly::Grid::ball(1, 9, 1.0);
  auto f = sample_fn(g, [](double x) { return std::sin(100.0 * x) * 1e-7; });
  std::ostringstream os;
  poly::write_csv(f, os);
  std::string text = os.str();
  CHECK(text.substr(0, text.find('\n')) == "x1,value");

  auto path = std::filesystem::temp_directory_path() / "polylap_csv_rt.csv";
  poly::write_csv(f, path.string());
  auto back = poly::read_csv(path.string(), g);
  for (std::size_t i = 0; i < f.values.size(); ++i)
    CHECK(back.values[i] == f.values[i]);  // bit-exact through %.17g
  std::filesystem::remove(path);
}

TEST_CASE("truncated polynomial product") {
  poly::MultivariatePolynomial a(1, 2), b(1, 2);
  poly::MultiIndex i0, i1, i2;
  i1.e = {1, 0, 0};
  i2.e = {2, 0, 0};
  a.set_coeff(i0, 1.0);
  a.set_coeff(i1, 2.0);
  b.set_coeff(i1, 1.0);
  auto ab = poly::multiply_truncated(a, b, 1);  // (1+2x)*x capped at degree 1
  CHECK(ab.coeff(i1) == doctest::Approx(1.0));
  CHECK(ab.coeff(i2) == 0.0);
  CHECK(ab.degree() <= 1);
}

}  // TEST_SUITE
