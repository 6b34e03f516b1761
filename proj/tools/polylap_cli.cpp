// Command-line front end: eval (renormalized sequences to CSV), verify
// (experiment suites to JSON reports), seminorm (grid Holder seminorms).
// Exit codes: 0 success, 2 invalid input or precondition, 3 numerical
// failure, 64 unknown suite. POLYLAP_THREADS caps worker threads.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polylap/divlap.hpp"
#include "polylap/expr.hpp"
#include "polylap/fd.hpp"
#include "polylap/verify.hpp"

namespace {

using polylap::PreconditionError;
namespace divlap = polylap::divlap;
namespace expr = polylap::expr;
namespace fdm = polylap::fd;
namespace quad = polylap::quad;

struct RunConfig {
  std::string expr;
  int n = 1;
  double s = 0.5;
  std::string k = "auto";
  int growth = -1;  // declared growth order; -1: infer from the expression
  std::vector<double> schedule = divlap::default_schedule();
  double grid_radius = -1;  // -1: command default (0.9 eval, 1.0 seminorm)
  int grid_nodes = 0;       // 0: dimension default
  quad::QuadratureConfig quad;
  std::string output_dir = "out";
  unsigned seed = 12345;
  double gamma = 0.5;
};

void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream is(path);
  if (!is) throw PreconditionError("config: cannot open " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError("config: " + std::string(e.what()));
  }
  try {
    if (j.contains("expr")) c.expr = j["expr"].get<std::string>();
    if (j.contains("n")) c.n = j["n"].get<int>();
    if (j.contains("s")) c.s = j["s"].get<double>();
    if (j.contains("k"))
      c.k = j["k"].is_string() ? j["k"].get<std::string>()
                               : std::to_string(j["k"].get<int>());
    if (j.contains("growth")) c.growth = j["growth"].get<int>();
    if (j.contains("schedule")) c.schedule = j["schedule"].get<std::vector<double>>();
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      if (g.contains("radius")) c.grid_radius = g["radius"].get<double>();
      if (g.contains("nodes")) c.grid_nodes = g["nodes"].get<int>();
    }
    if (j.contains("quadrature")) {
      const auto& q = j["quadrature"];
      if (q.contains("delta")) c.quad.delta = q["delta"].get<double>();
      if (q.contains("radial_nodes")) c.quad.radial_nodes = q["radial_nodes"].get<int>();
      if (q.contains("angular_nodes")) c.quad.angular_nodes = q["angular_nodes"].get<int>();
      if (q.contains("r_max")) c.quad.r_max = q["r_max"].get<double>();
      if (q.contains("analytic_tail")) c.quad.analytic_tail = q["analytic_tail"].get<bool>();
      if (q.contains("abs_tol")) c.quad.abs_tol = q["abs_tol"].get<double>();
      if (q.contains("growth_check")) {
        std::string v = q["growth_check"].get<std::string>();
        if (v == "enforce")
          c.quad.growth_check = quad::GrowthCheck::Enforce;
        else if (v == "bypass")
          c.quad.growth_check = quad::GrowthCheck::Bypass;
        else
          throw PreconditionError("config: growth_check must be enforce or bypass");
      }
    }
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("seed")) c.seed = j["seed"].get<unsigned>();
    if (j.contains("gamma")) c.gamma = j["gamma"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError("config: " + std::string(e.what()));
  }
}

int resolve_k(const std::string& k) {
  if (k == "auto") return -1;
  try {
    std::size_t used = 0;
    int v = std::stoi(k, &used);
    if (used != k.size() || v < 0) throw std::invalid_argument(k);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("k must be a natural number or \"auto\"");
  }
}

std::shared_ptr<const polylap::poly::Grid> make_grid(const RunConfig& c,
                                                     double default_radius) {
  double radius = c.grid_radius > 0 ? c.grid_radius : default_radius;
  int nodes = c.grid_nodes;
  if (nodes == 0) nodes = c.n == 1 ? 41 : (c.n == 2 ? 21 : 11);
  return polylap::poly::Grid::ball(c.n, nodes, radius);
}

expr::ScalarField parse_field(const RunConfig& c) {
  if (c.expr.empty()) throw PreconditionError("--expr is required");
  std::optional<int> growth;
  if (c.growth >= 0) growth = c.growth;
  try {
    return expr::parse_expression(c.expr, c.n, growth);
  } catch (const polylap::ParseError& e) {
    throw PreconditionError("expression at offset " + std::to_string(e.offset) +
                            ": " + e.what());
  }
}

std::string num_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

int cmd_eval(const RunConfig& c) {
  auto field = quad::as_field(parse_field(c));
  polylap::kernel::KernelParams kp;
  kp.n = c.n;
  kp.s = c.s;
  kp.k = 0;
  auto grid = make_grid(c, 0.9);
  auto res = divlap::divergent_laplacian(field, resolve_k(c.k), c.schedule, kp,
                                         c.quad, grid);

  std::filesystem::create_directories(c.output_dir);
  auto out = [&](const std::string& f) {
    return (std::filesystem::path(c.output_dir) / f).string();
  };
  nlohmann::ordered_json result;
  result["expr"] = c.expr;
  result["n"] = c.n;
  result["s"] = c.s;
  result["k"] = res.seq.params.k;
  result["modulus_degree"] = res.cls.modulus_degree;
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const auto& e : res.seq.entries) {
    std::string csv = out("sharp_R" + num_label(e.R) + ".csv");
    polylap::poly::write_csv(e.f_sharp, csv);
    nlohmann::ordered_json step;
    step["R"] = e.R;
    step["nu"] = e.nu_R;
    step["sharp_sup"] = e.f_sharp.sup_norm();
    step["csv"] = csv;
    steps.push_back(step);
    std::printf("R=%s nu=%.17g sup=%.17g\n", num_label(e.R).c_str(), e.nu_R,
                e.f_sharp.sup_norm());
  }
  result["sequence"] = steps;
  std::string class_csv = out("class.csv");
  polylap::poly::write_csv(res.cls.representative, class_csv);
  result["class_csv"] = class_csv;
  result["class_sup"] = res.cls.representative.sup_norm();
  std::printf("class sup=%.17g (modulo degree <= %d)\n",
              res.cls.representative.sup_norm(), res.cls.modulus_degree);
  std::ofstream os(out("result.json"));
  os << result.dump(2) << '\n';
  return 0;
}

int cmd_verify(const std::string& suite, const RunConfig& c) {
  static const std::vector<std::string> known = {"identity", "liouville",
                                                 "schauder", "stability", "cauchy"};
  if (std::find(known.begin(), known.end(), suite) == known.end()) {
    std::fprintf(stderr, "unknown suite: %s\n", suite.c_str());
    return 64;
  }
  polylap::verify::SuiteOptions opt;
  opt.params.n = c.n;
  opt.params.s = c.s;
  opt.quad = c.quad;
  opt.schedule = c.schedule;
  opt.output_dir = c.output_dir;
  opt.seed = c.seed;
  auto rep = polylap::verify::run_suite(suite, opt);
  std::filesystem::create_directories(c.output_dir);
  std::string path =
      (std::filesystem::path(c.output_dir) / (suite + "_report.json")).string();
  rep.write(path);
  std::printf("%s: %s (%s)\n", suite.c_str(), rep.pass ? "pass" : "fail",
              path.c_str());
  return rep.pass ? 0 : 1;
}

int cmd_seminorm(const RunConfig& c) {
  auto f = parse_field(c);
  fdm::HolderOrder ord{c.gamma};
  ord.validate();
  int k = c.k == "auto" ? 0 : resolve_k(c.k);
  auto grid = make_grid(c, 1.0);
  double plain = fdm::holder_seminorm(f, ord, grid);
  double mod = fdm::holder_seminorm_mod_poly(f, ord, k, grid);
  std::printf("plain %.17g\n", plain);
  std::printf("mod_poly %.17g\n", mod);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  // The config file seeds the defaults; explicit flags override it.
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    try {
      if (a == "--config" && i + 1 < argc)
        apply_config_file(argv[i + 1], cfg);
      else if (a.rfind("--config=", 0) == 0)
        apply_config_file(a.substr(9), cfg);
    } catch (const PreconditionError& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 2;
    }
  }

  CLI::App app{"Fractional Laplacian of polynomially growing functions via cutoff renormalization"};
  app.require_subcommand(0, 1);
  std::string config_path, suite;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    cmd->add_option("--n", cfg.n, "ambient dimension, 1..3");
    cmd->add_option("--s", cfg.s, "fractional order in (0,1)");
    cmd->add_option("--out", cfg.output_dir, "output directory");
    cmd->add_option("--grid-radius", cfg.grid_radius, "evaluation grid radius");
    cmd->add_option("--grid-nodes", cfg.grid_nodes, "grid nodes per axis");
    cmd->add_option("--delta", cfg.quad.delta, "near-field split radius");
    cmd->add_option("--radial-nodes", cfg.quad.radial_nodes, "radial quadrature nodes");
    cmd->add_option("--angular-nodes", cfg.quad.angular_nodes, "angular nodes (n=2)");
    cmd->add_option("--r-max", cfg.quad.r_max, "radial truncation radius");
    cmd->add_option("--abs-tol", cfg.quad.abs_tol, "target absolute tolerance");
  };

  CLI::App* ev = app.add_subcommand("eval", "run the renormalized sequence, write CSVs");
  ev->add_option("--expr", cfg.expr, "expression in x1..xn");
  ev->add_option("--k", cfg.k, "renormalization order or \"auto\"");
  ev->add_option("--growth", cfg.growth, "declared growth order of the expression");
  ev->add_option("--schedule", cfg.schedule, "cutoff radii (>= 4, increasing)");
  add_common(ev);

  CLI::App* vf = app.add_subcommand("verify", "run an experiment suite, write a JSON report");
  vf->add_option("suite", suite, "identity|liouville|schauder|stability|cauchy")
      ->required();
  vf->add_option("--schedule", cfg.schedule, "cutoff radii (>= 4, increasing)");
  vf->add_option("--seed", cfg.seed, "seed for randomized candidates");
  add_common(vf);

  CLI::App* sn = app.add_subcommand("seminorm", "print plain and mod-poly Holder seminorms");
  sn->add_option("--expr", cfg.expr, "expression in x1..xn");
  sn->add_option("--gamma", cfg.gamma, "Holder order, non-integer");
  sn->add_option("--k", cfg.k, "modulus order: polynomials of degree <= k-1");
  sn->add_option("--growth", cfg.growth, "declared growth order of the expression");
  add_common(sn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (ev->parsed()) return cmd_eval(cfg);
    if (vf->parsed()) return cmd_verify(suite, cfg);
    if (sn->parsed()) return cmd_seminorm(cfg);
    std::cout << app.help();
    return 0;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const polylap::NumericError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
