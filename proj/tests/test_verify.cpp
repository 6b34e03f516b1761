#include <filesystem>
#include <fstream>

#include <doctest.h>
#include <json.hpp>

#include "polylap/verify.hpp"

using namespace polylap;

TEST_SUITE("verify") {

TEST_CASE("identity suite passes and its report is self-contained") {
  verify::SuiteOptions opt;
  auto rep = verify::run_identity_suite(opt);
  CHECK(rep.pass);
  CHECK(rep.name == "identity");

  bool saw_zero = false, saw_x2 = false;
  for (const auto& [k, v] : rep.metrics) {
    if (k == "equal_zero") {
      saw_zero = true;
      CHECK(v == 1.0);
    }
    if (k == "equal_x_squared") {
      saw_x2 = true;
      CHECK(v == 0.0);
    }
  }
  CHECK(saw_zero);
  CHECK(saw_x2);

  auto path = std::filesystem::temp_directory_path() / "polylap_identity.json";
  rep.write(path.string());
  std::ifstream is(path);
  auto j = nlohmann::ordered_json::parse(is);
  CHECK(j["name"] == "identity");
  CHECK(j["verdict"] == "pass");
  CHECK(j["metrics"].contains("class_tol"));
  // stable top-level key order
  auto it = j.begin();
  CHECK(it.key() == "name");
  ++it;
  CHECK(it.key() == "params");
  std::filesystem::remove(path);
}

TEST_CASE("cauchy suite passes with the closed-form tail") {
  verify::SuiteOptions opt;
  auto rep = verify::run_cauchy_suite(opt);
  CHECK(rep.pass);
  for (const auto& [k, v] : rep.metrics)
    if (k == "max_nu_err") CHECK(v <= 1e-6);
}

TEST_CASE("stability suite passes for the standard battery") {
  verify::SuiteOptions opt;
  auto rep = verify::run_stability_suite(opt);
  CHECK(rep.pass);
}

TEST_CASE("unknown suites are rejected") {
  verify::SuiteOptions opt;
  CHECK_THROWS_AS(verify::run_suite("nosuch", opt), PreconditionError);
}

}  // TEST_SUITE
