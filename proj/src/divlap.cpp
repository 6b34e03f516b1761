#include "polylap/divlap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"

namespace polylap::divlap {

int d_of_ks(int k, double s) {
  if (k < 0) throw PreconditionError("d(k,s): order must be a natural number");
  if (!(s > 0.0 && s < 1.0)) throw PreconditionError("d(k,s): s must lie in (0,1)");
  return s > 0.5 ? k + 1 : k;
}

int minimal_admissible_k(int growth, double s) {
  if (!(s > 0.0 && s < 1.0))
    throw PreconditionError("admissible order: s must lie in (0,1)");
  int k = std::max(0, static_cast<int>(std::floor(growth - 2.0 * s)) + 1);
  while (!(growth < 2.0 * s + k)) ++k;  // strictness despite rounding
  return k;
}

double class_equal_tol(const quad::QuadratureConfig& cfg) {
  return std::max(1e-4, 50.0 * cfg.abs_tol);
}

std::vector<double> default_schedule() { return {8, 16, 32, 64, 128}; }

DivergentResult divergent_laplacian(const quad::Field& u, int k,
                                    const std::vector<double>& schedule,
                                    const kernel::KernelParams& params,
                                    const quad::QuadratureConfig& cfg,
                                    std::shared_ptr<const poly::Grid> grid) {
  kernel::KernelParams kp = params;
  kp.k = k == -1 ? minimal_admissible_k(u.growth, kp.s) : k;
  kp.validate();
  if (u.dim != kp.n)
    throw PreconditionError("sequence: field dimension does not match kernel dimension");
  if (cfg.growth_check == quad::GrowthCheck::Enforce &&
      !(u.growth < 2.0 * kp.s + kp.k))
    throw PreconditionError("sequence: tail integral diverges under the declared growth");
  if (schedule.size() < 4)
    throw PreconditionError("sequence: schedule needs at least 4 radii");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] >= 4.0))
      throw PreconditionError("sequence: radii must be >= 4");
    if (i > 0 && !(schedule[i] > schedule[i - 1]))
      throw PreconditionError("sequence: radii must be strictly increasing");
  }
  if (!grid) grid = poly::default_eval_grid(kp.n);

  DivergentResult out;
  out.seq.params = kp;
  out.seq.schedule = schedule;
  out.seq.entries.reserve(schedule.size());
  for (double R : schedule) {
    SequenceEntry e;
    e.R = R;
    auto dec = quad::decompose(u, R, grid, kp, cfg);
    e.f_R = dec.sum();
    e.P_R = dec.P;
    e.f_sharp = poly::sharp_representative(e.f_R, kp.k).sharp;
    e.nu_R = quad::tail_integral(u, kp.k, R, kp, cfg);
    out.seq.entries.push_back(std::move(e));
  }

  // nu must not grow along the schedule (up to roundoff) when it is finite.
  for (std::size_t i = 1; i < out.seq.entries.size(); ++i) {
    double a = out.seq.entries[i - 1].nu_R, b = out.seq.entries[i].nu_R;
    if (std::isfinite(a) && std::isfinite(b) && b > a * (1.0 + 1e-9) + 1e-300)
      throw NumericError("sequence: tail integrals increased along the schedule");
  }

  // One geometric correction step. The sharp representatives converge at
  // some rate C(x) rho^j along the schedule; the observed ratio of the last
  // two consecutive differences estimates rho without assuming which power
  // of the tail drives the error. Skipped unless the differences are
  // clearly contracting with matching spatial profiles.
  const auto& ent = out.seq.entries;
  const std::size_t ne = ent.size();
  poly::SampledFunction rep = ent.back().f_sharp;
  {
    poly::SampledFunction dlast = ent[ne - 1].f_sharp - ent[ne - 2].f_sharp;
    poly::SampledFunction dprev = ent[ne - 2].f_sharp - ent[ne - 3].f_sharp;
    double nl = 0, np = 0, ip = 0;
    for (std::size_t i = 0; i < dlast.values.size(); ++i) {
      nl += dlast.values[i] * dlast.values[i];
      np += dprev.values[i] * dprev.values[i];
      ip += dlast.values[i] * dprev.values[i];
    }
    nl = std::sqrt(nl);
    np = std::sqrt(np);
    if (nl > 1e-14 && np > 1e-14) {
      double rho = nl / np;
      double align = ip / (nl * np);
      if (rho <= 0.9 && align >= 0.5) {
        dlast *= rho / (1.0 - rho);
        rep += dlast;
      }
    }
  }
  out.cls.representative = std::move(rep);
  out.cls.modulus_degree = kp.k - 1;
  return out;
}

CauchyReport cauchy_rate_report(const RenormalizedSequence& seq) {
  if (seq.entries.size() < 3)
    throw PreconditionError("rate report: needs at least 3 sequence entries");
  CauchyReport rep;
  for (std::size_t i = 0; i + 1 < seq.entries.size(); ++i) {
    const auto& a = seq.entries[i];
    const auto& b = seq.entries[i + 1];
    double diff = (b.f_sharp - a.f_sharp).sup_norm();
    rep.radii.push_back(a.R);
    rep.diffs.push_back(diff);
    rep.nus.push_back(a.nu_R);
    rep.ratios.push_back(diff <= 1e-12 ? 0.0 : diff / a.nu_R);
  }
  std::size_t m = std::min<std::size_t>(3, rep.ratios.size());
  double lo = std::numeric_limits<double>::infinity(), hi = 0;
  for (std::size_t i = rep.ratios.size() - m; i < rep.ratios.size(); ++i) {
    lo = std::min(lo, rep.ratios[i]);
    hi = std::max(hi, rep.ratios[i]);
  }
  rep.rate_consistent = hi <= 3.0 * lo + 1e-12;
  return rep;
}

PolyModClass reduce_class(const quad::Field& u, const DivergentResult& at_order_k,
                          int j, const quad::QuadratureConfig& cfg) {
  const int k = at_order_k.cls.modulus_degree + 1;
  if (j < 0 || j > k)
    throw PreconditionError("order reduction: target order must lie in 0..k");
  auto lower = divergent_laplacian(u, j, at_order_k.seq.schedule,
                                   at_order_k.seq.params, cfg,
                                   at_order_k.cls.representative.grid);
  if (!poly::class_equal(lower.cls.representative, at_order_k.cls.representative,
                         k, class_equal_tol(cfg)))
    throw NumericError(
        "order reduction: representatives differ by more than a degree-(k-1) polynomial");
  return lower.cls;
}

poly::SampledFunction fixed_cutoff_rhs(const quad::Field& u, double rho,
                                       const PolyModClass& cls,
                                       const kernel::KernelParams& params,
                                       const quad::QuadratureConfig& cfg) {
  params.validate();
  if (!(rho >= 1.0)) throw PreconditionError("fixed cutoff: rho must be >= 1");
  if (params.k != cls.modulus_degree + 1)
    throw PreconditionError("fixed cutoff: class modulus does not match the kernel order");
  auto grid = cls.representative.grid;
  poly::SampledFunction out = cls.representative;
  const double a = std::max(2.0, rho);
  detail::parallel_for(grid->pts.size(), [&](std::size_t i) {
    const Point& x = grid->pts[i];
    double v = 0;
    if (rho < 2.0) v += quad::ring_integral(u, rho, 2.0, x, params, cfg);
    v -= quad::psi_tail_integral(u, a, x, params, cfg);
    out.values[i] += v;
  });
  return out;
}

}  // namespace polylap::divlap
