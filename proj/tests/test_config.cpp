#include <string>

#include "config.hpp"
#include "doctest.h"

using namespace bsopt;
using namespace bsopt::cli;

namespace {

// path of the ConfigError thrown by f, or "none"
template <class F>
std::string error_path(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.path;
  }
  return "none";
}

json base() {
  return json::parse(R"({
    "generator": {"family": "kl"},
    "reference_vector": [0.2, 0.3, 0.5],
    "constraint": {"type": "coordinate_at_least", "index": 0, "value": 0.5},
    "estimator": {"n": 300, "L": 1000, "seed": 3}
  })");
}

}  // namespace

TEST_CASE("a valid problem") {
  const ProblemSpec s = parse_problem(base(), "");
  CHECK(s.problem.K() == 3);
  CHECK(s.problem.mode() == Mode::Simplex);
  CHECK(s.estimator.n == 300);
  CHECK(s.estimator.seed == 3u);
  CHECK(s.slab == doctest::Approx(0.01));
  CHECK(s.problem.omega().contains({0.6, 0.2, 0.2}));
  CHECK_FALSE(s.problem.omega().contains({0.4, 0.3, 0.3}));
}

TEST_CASE("errors carry the path of the offending value") {
  json j = base();
  j["generator"]["family"] = "nope";
  CHECK(error_path([&] { parse_problem(j, ""); }) == "/generator/family");

  j = base();
  j["reference_vector"][1] = -1;
  CHECK(error_path([&] { parse_problem(j, ""); }) == "/reference_vector/1");

  j = base();
  j["estimator"]["bogus"] = 1;
  CHECK(error_path([&] { parse_problem(j, ""); }) == "/estimator/bogus");

  j = base();
  j["constraint"] = json::parse(R"({"type": "all", "of": [{"type": "everything"},
                                  {"type": "coordinate_at_most", "index": 7, "value": 1}]})");
  CHECK(error_path([&] { parse_problem(j, ""); }) == "/constraint/of/1/index");

  j = base();
  j.erase("constraint");
  CHECK(error_path([&] { parse_problem(j, ""); }) == "/constraint");

  j = base();
  j["data_file"] = "x.txt";
  CHECK(error_path([&] { parse_problem(j, ""); }) == "");

  j = base();
  j["generator"] = json::parse(R"({"family": "power", "gamma": 2, "scale": -1})");
  CHECK(error_path([&] { parse_problem(j, ""); }) == "/generator");

  j = base();
  j["estimator"]["proxy"] = json::parse(R"({"method": "given", "q_star": [0.5, 0.5]})");
  CHECK(error_path([&] { parse_problem(j, ""); }) == "/estimator/proxy/q_star");
}

TEST_CASE("problem sections") {
  const AssignmentInstance a = parse_assignment(json::parse(R"({"cost": [[1, 2], [3, 4]], "eps1": 0.1})"));
  CHECK(a.eps1 == doctest::Approx(0.1));
  CHECK(error_path([] { parse_assignment(json::parse(R"({"cost": [[1, 2], [3]]})")); }) == "/cost/1");
  const EntropyMaxInstance e = parse_entropy_max(json::parse(R"({"entropy": {"name": "renyi", "gamma": 3}, "K": 4})"));
  CHECK(e.K == 4);
  CHECK(e.entropy.kind == EntropyKind::Renyi);
  CHECK(error_path([] { parse_entropy_max(json::parse(R"({"entropy": {"name": "x"}, "K": 4})")); }) == "/entropy/name");
  const QuadraticInstance q = parse_quadratic(json::parse(R"({"c1": [0, 0], "c2": [-1, -1], "c3": [1, 2], "total": 1})"));
  REQUIRE(q.total);
  CHECK(*q.total == 1.0);
}
