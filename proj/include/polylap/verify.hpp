#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "polylap/divlap.hpp"
#include "polylap/expr.hpp"
#include "polylap/quad.hpp"

namespace polylap::verify {

using ordered_json = nlohmann::ordered_json;

/// Self-contained experiment record: the verdict is recomputable from the
/// serialized metrics and thresholds alone. Serialization is stable
/// (insertion-ordered keys, shortest round-trip numbers, no timestamps).
struct ExperimentReport {
  std::string name;
  ordered_json params;
  std::vector<std::pair<std::string, double>> metrics;
  bool pass = false;
  std::vector<std::string> artifacts;

  void add(const std::string& key, double value) { metrics.emplace_back(key, value); }
  ordered_json to_json() const;
  /// Writes to a temporary file in the target directory, then renames.
  void write(const std::string& path) const;
};

struct SuiteOptions {
  kernel::KernelParams params;            // s (and n where a suite allows it)
  quad::QuadratureConfig quad;
  std::vector<double> schedule = divlap::default_schedule();
  std::string output_dir;                 // empty: no CSV artifacts
  unsigned seed = 12345;
};

/// x^2 at n=1, s=1/2, k=2 has the zero class: equal to the classes of
/// 0, 1, -1, x and three seeded random affine functions, not equal to x^2.
ExperimentReport run_identity_suite(const SuiteOptions& opt);

/// Monomials {1, x, x^2, x^3, x1 x2} at the minimal admissible order all
/// have zero class; fixed positive combinations (s=0.75 at k=0/1 and
/// s=0.5 at k=2) are zero too; x^3 at the forced order (s=0.5, k=2) is the
/// negative control whose sharp representatives stay away from zero.
ExperimentReport run_liouville_suite(const SuiteOptions& opt);

/// Dilation families u(lambda x), lambda in {1,2,4}: the ratio of the
/// interior Holder norm of u to (mod-poly seminorm of the class + tail
/// integral) stays within a 10x band across each family. Probes (k=0,
/// gamma=0.5) on bounded fields and (k=2, gamma=2.5) on quadratic-growth
/// fields.
ExperimentReport run_schauder_probe(const SuiteOptions& opt);

/// Mollification stability for one field: class gaps of u_m vs u decrease
/// over m in {4,8,16} and end below 100x the quadrature tolerance; tail
/// integrals of the u_m must stay uniformly comparable to u's (refusal
/// path: PreconditionError).
ExperimentReport run_stability_case(const expr::ScalarField& u, int k,
                                    const std::string& label,
                                    const SuiteOptions& opt);

/// The standard stability battery: x^2 at k=2 and exp(-x^2) at k=0.
ExperimentReport run_stability_suite(const SuiteOptions& opt);

/// Cauchy rates for x^2 at (s=0.5, k=2): consecutive sharp-representative
/// differences over tail weights vary by <= 3x across the last three
/// doublings, and nu_R matches the closed form 2/R.
ExperimentReport run_cauchy_suite(const SuiteOptions& opt);

/// Dispatch by suite name ("identity", "liouville", "schauder",
/// "stability", "cauchy"); unknown names raise PreconditionError.
ExperimentReport run_suite(const std::string& name, const SuiteOptions& opt);

}  // namespace polylap::verify
