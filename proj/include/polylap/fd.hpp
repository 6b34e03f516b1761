#pragma once

#include <memory>
#include <vector>

#include "polylap/common.hpp"
#include "polylap/expr.hpp"
#include "polylap/poly.hpp"

namespace polylap::fd {

/// Composition of one-direction differences (T_{h w} - I) for each listed
/// direction; order d = directions.size().
struct FiniteDifferenceStencil {
  std::vector<Point> directions;  // unit vectors
  double h = 0;                   // step, in (0,1)

  void validate(int dim) const;
};

/// gamma = m + theta with m = floor(gamma) and theta in (0,1); gamma must
/// not be an integer.
struct HolderOrder {
  double gamma = 0.5;

  int m() const;
  double theta() const;
  void validate() const;
};

/// D_h f(x): alternating-sign sum of f over the 2^d shift subsets.
double finite_difference(const expr::ScalarField& f,
                         const FiniteDifferenceStencil& st, const Point& x);
/// Sampled variant; every shifted point must land on a grid node (the grid
/// spacing must divide h along each direction used).
double finite_difference(const poly::SampledFunction& f,
                         const FiniteDifferenceStencil& st, const Point& x);

/// Exact mixed directional derivative along the stencil directions,
/// for h -> 0 convergence checks against h^{-d} D_h.
double directional_derivative(const expr::ScalarField& f,
                              const std::vector<Point>& directions, const Point& x);

/// Difference f(. + sign e_axis) - f(.) on the grid, with off-grid neighbor
/// values taken as 0; adjoint under the grid sum for interior-supported
/// functions. axis is 1-based.
poly::SampledFunction axis_difference(const poly::SampledFunction& f, int axis,
                                      int sign);

/// Grid Holder seminorm: max over distinct grid pairs and all order-m
/// partials of |D^m f(x) - D^m f(y)| / |x-y|^theta. A lower bound of the
/// continuum seminorm; exact derivatives for symbolic fields, grid
/// differences (step = spacing) for sampled ones.
double holder_seminorm(const expr::ScalarField& f, const HolderOrder& order,
                       std::shared_ptr<const poly::Grid> grid);
double holder_seminorm(const poly::SampledFunction& f, const HolderOrder& order);

/// Seminorm of f minus the best polynomial of degree <= k-1. For
/// gamma > k-1 the polynomial drops out of the order-m differences and the
/// plain seminorm is returned exactly; otherwise the minimax program over
/// the polynomial coefficients is solved iteratively (residual set thinned
/// to at most 10^4 pairs).
double holder_seminorm_mod_poly(const expr::ScalarField& f, const HolderOrder& order,
                                int k, std::shared_ptr<const poly::Grid> grid);
double holder_seminorm_mod_poly(const poly::SampledFunction& f,
                                const HolderOrder& order, int k);

}  // namespace polylap::fd
