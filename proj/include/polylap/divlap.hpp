#pragma once

#include <memory>
#include <vector>

#include "polylap/poly.hpp"
#include "polylap/quad.hpp"

namespace polylap::divlap {

/// Largest degree d such that every polynomial of degree <= d has zero
/// order-k class: k+1 when s > 1/2, else k.
int d_of_ks(int k, double s);

/// Smallest k >= 0 with growth < 2s + k, i.e. the lowest renormalization
/// order whose tail integral converges for the declared growth.
int minimal_admissible_k(int growth, double s);

/// Class-equality tolerance used by the sequence engine: quadrature noise
/// propagates into the polynomial fits, so it never goes below 1e-4.
double class_equal_tol(const quad::QuadratureConfig& cfg);

struct SequenceEntry {
  double R = 0;
  poly::SampledFunction f_R;             // f1 + f2 + fstar at this radius
  poly::MultivariatePolynomial P_R;      // degree <= k-1
  poly::SampledFunction f_sharp;         // L2-optimal representative of f_R
  double nu_R = 0;                       // int_{|y|>R} |u| |y|^{-n-2s-k} dy
};

struct RenormalizedSequence {
  kernel::KernelParams params;
  std::vector<double> schedule;
  std::vector<SequenceEntry> entries;
};

/// A function modulo polynomials of degree <= modulus_degree; equality is
/// poly::class_equal on the shared grid.
struct PolyModClass {
  poly::SampledFunction representative;
  int modulus_degree = -1;  // k - 1
};

struct DivergentResult {
  RenormalizedSequence seq;
  PolyModClass cls;
};

/// Runs the cutoff renormalization over the radius schedule: per R the
/// decomposition f_R = f1+f2+fstar with correction polynomial P_R, the
/// L2-sharp representative, and the tail weight nu_R. The limit class is the
/// last sharp representative improved by one geometric extrapolation step
/// from the observed contraction of consecutive differences (skipped when
/// the differences are too small or not clearly contracting).
///
/// k == -1 selects the minimal admissible order for u's declared growth.
/// The schedule needs >= 4 strictly increasing radii, the first >= 4.
/// grid == nullptr uses the default evaluation grid (radius 0.9).
DivergentResult divergent_laplacian(const quad::Field& u, int k,
                                    const std::vector<double>& schedule,
                                    const kernel::KernelParams& params,
                                    const quad::QuadratureConfig& cfg,
                                    std::shared_ptr<const poly::Grid> grid = nullptr);

/// Default radius schedule {8, 16, 32, 64, 128}.
std::vector<double> default_schedule();

struct CauchyReport {
  std::vector<double> radii;   // smaller radius of each consecutive pair
  std::vector<double> diffs;   // ||f_sharp_{R'} - f_sharp_R||_sup
  std::vector<double> nus;     // nu_R at the smaller radius
  std::vector<double> ratios;  // diff / nu (0 when the diff is negligible)
  bool rate_consistent = false;
};

/// Consecutive-difference-to-tail ratios; rate_consistent when the last
/// (up to) three ratios agree within a factor of 3. Pre: >= 3 entries.
CauchyReport cauchy_rate_report(const RenormalizedSequence& seq);

/// Recomputes the class at a lower order j <= k over the same schedule and
/// grid, and checks that the two representatives differ by a polynomial of
/// degree <= k-1 (they must; violation raises NumericError).
PolyModClass reduce_class(const quad::Field& u, const DivergentResult& at_order_k,
                          int j, const quad::QuadratureConfig& cfg);

/// Right-hand side satisfied by u against the fixed cutoff 1_{B_rho}:
///   f(x) + int_{B_2 \ B_rho} u(y)|x-y|^{-n-2s} dy
///        - int_{|y| >= max(2,rho)} u(y) psi(x,y) |y|^{-n-2s-k} dy
/// on the representative's grid. Pre: rho >= 1.
poly::SampledFunction fixed_cutoff_rhs(const quad::Field& u, double rho,
                                       const PolyModClass& cls,
                                       const kernel::KernelParams& params,
                                       const quad::QuadratureConfig& cfg);

}  // namespace polylap::divlap
