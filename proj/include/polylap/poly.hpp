#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "polylap/common.hpp"

namespace polylap::poly {

struct MultiIndex {
  std::array<int, 3> e{0, 0, 0};

  int order() const { return e[0] + e[1] + e[2]; }
  bool operator==(const MultiIndex& o) const { return e == o.e; }
  bool operator<(const MultiIndex& o) const {
    if (order() != o.order()) return order() < o.order();
    return e < o.e;
  }
};

/// Product of two polynomials with every term above degree_cap dropped
/// (degree_cap -1 keeps nothing).
class MultivariatePolynomial;
MultivariatePolynomial multiply_truncated(const MultivariatePolynomial& a,
                                          const MultivariatePolynomial& b,
                                          int degree_cap);

/// All multi-indices with order <= max_order in the first `dim` slots,
/// in the canonical (order, lexicographic) order shared by every basis,
/// Gram matrix and coefficient listing in this project. max_order == -1
/// yields the empty basis.
std::vector<MultiIndex> multi_indices(int dim, int max_order);

class MultivariatePolynomial {
 public:
  MultivariatePolynomial() = default;
  /// Zero polynomial with the given declared bound; bound -1 is the zero
  /// polynomial of the empty basis.
  MultivariatePolynomial(int dim, int degree_bound)
      : dim_(dim), degree_bound_(degree_bound) {}

  int dimension() const { return dim_; }
  int degree_bound() const { return degree_bound_; }
  /// Largest order carrying a nonzero coefficient; -1 when identically zero.
  int degree() const;

  double coeff(const MultiIndex& a) const;
  void set_coeff(const MultiIndex& a, double c);
  const std::map<MultiIndex, double>& coeffs() const { return coeffs_; }

  double eval(const double* x) const;
  double eval(const Point& x) const { return eval(x.data()); }

  MultivariatePolynomial derivative(int axis) const;  // 1-based axis

  MultivariatePolynomial& operator+=(const MultivariatePolynomial& o);
  MultivariatePolynomial& operator-=(const MultivariatePolynomial& o);
  MultivariatePolynomial& operator*=(double c);

  std::string to_string() const;

 private:
  int dim_ = 1;
  int degree_bound_ = -1;
  std::map<MultiIndex, double> coeffs_;
};

/// Tensor-product grid over [-radius, radius]^dim masked to the closed ball
/// |x| <= radius. Weights are per-axis trapezoid weights multiplied through
/// the tensor product and zeroed outside the ball, so sums approximate
/// integrals over the ball.
struct Grid {
  int dim = 1;
  int per_axis = 0;
  double radius = 0;
  std::vector<double> axis;                // shared coordinate set per axis
  std::vector<Point> pts;                  // in-ball points
  std::vector<double> w;                   // quadrature weight per point
  std::vector<std::array<int, 3>> idx;     // tensor index per point
  std::vector<int> flat;                   // tensor index -> point id, -1 outside

  static std::shared_ptr<const Grid> ball(int dim, int per_axis, double radius);

  double spacing() const { return axis.size() > 1 ? axis[1] - axis[0] : 0.0; }
  int lookup(const std::array<int, 3>& t) const;
  bool same_layout(const Grid& o) const {
    return dim == o.dim && per_axis == o.per_axis && radius == o.radius;
  }
};

/// Default evaluation grid for renormalized sequences (radius 0.9).
std::shared_ptr<const Grid> default_eval_grid(int dim);
/// Default unit-ball grid for discrete L2(B1) inner products.
std::shared_ptr<const Grid> default_unit_grid(int dim);

struct SampledFunction {
  std::shared_ptr<const Grid> grid;
  std::vector<double> values;

  static SampledFunction sample(std::shared_ptr<const Grid> g,
                                const std::function<double(const double*)>& f);
  static SampledFunction zeros(std::shared_ptr<const Grid> g);

  double sup_norm() const;
  double weighted_l2_norm() const;

  SampledFunction& operator+=(const SampledFunction& o);
  SampledFunction& operator-=(const SampledFunction& o);
  SampledFunction& operator*=(double c);
  friend SampledFunction operator+(SampledFunction a, const SampledFunction& b) {
    return a += b;
  }
  friend SampledFunction operator-(SampledFunction a, const SampledFunction& b) {
    return a -= b;
  }
};

/// Exact Gram matrix of the monomial basis of degree <= degree under the
/// L2 inner product over the unit ball, in the canonical basis order.
Eigen::MatrixXd gram_matrix(int dim, int degree);

/// Closed-form integral of x^beta over the unit ball in R^dim)
/// (zero whenever any component of beta is odd).
double ball_monomial_integral(int dim, const MultiIndex& beta);

struct SharpResult {
  SampledFunction sharp;           // g + shift on the grid of g
  MultivariatePolynomial shift;    // minimizer P of ||g + P||_{L2,grid}, deg <= k-1
};

/// L2-optimal representative of g modulo polynomials of degree <= k-1,
/// computed with the discrete inner product of g's grid. k == 0 returns g
/// unchanged with the empty-basis zero shift.
SharpResult sharp_representative(const SampledFunction& g, int k);

/// Fits the last element of `seq` by a polynomial of degree <= degree
/// (weighted least squares, per-monomial column scaling). Succeeds when the
/// unweighted sup-norm residual is <= tol and, if seq has >= 2 elements, the
/// fitted coefficients over the last three (or two) elements are pairwise
/// within tol. degree == -1 fits the zero polynomial.
std::optional<MultivariatePolynomial> fit_polynomial_limit(
    const std::vector<SampledFunction>& seq, int degree, double tol);

/// True when a - b is a polynomial of degree <= k-1 on the shared grid,
/// within tol.
bool class_equal(const SampledFunction& a, const SampledFunction& b, int k,
                 double tol);

/// CSV serialization: header x1..xn,value; one row per grid point in grid
/// order; values with 17 significant digits; '.' decimal separator.
void write_csv(const SampledFunction& f, std::ostream& os);
void write_csv(const SampledFunction& f, const std::string& path);
/// Reads back the value column of a CSV written by write_csv; the caller
/// supplies the grid (layout is not serialized).
SampledFunction read_csv(const std::string& path, std::shared_ptr<const Grid> grid);

}  // namespace polylap::poly
