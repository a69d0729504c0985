#include <cmath>

#include "bsopt/problems.hpp"
#include "doctest.h"

using namespace bsopt;

TEST_CASE("linear reduction constants") {
  const LinearReduction r = reduce_linear(LinearInstance{{1.0, 1.0}, 2.0, 1.0, ConstraintSet::everything()});
  CHECK(r.c1 == doctest::Approx(0.5));
  CHECK(r.P == Vec{0.5, 0.5});
  CHECK_FALSE(r.maximize);
  CHECK(reduce_linear(LinearInstance{{1.0, 2.0}, 0.5, 1.0, ConstraintSet::everything()}).maximize);
  CHECK_THROWS_AS(reduce_linear(LinearInstance{{1.0, 2.0}, 1.5, 1.0, ConstraintSet::everything()}), DomainError);
}

TEST_CASE("quadratic objective equals offset plus divergence") {
  const QuadraticInstance q{{0.5, -1.0}, {-1.0, -2.0}, {1.0, 3.0}, ConstraintSet::everything(), std::nullopt};
  const QuadraticReduction r = reduce_quadratic(q);
  for (const Vec& x : {Vec{0.2, 0.7}, Vec{1.5, -0.3}}) {
    const double d = divergence(Generator(r.gen), r.to_q(x), r.P);
    CHECK(quadratic_objective(q, x) == doctest::Approx(r.c4 + d).epsilon(1e-12));
  }
}

TEST_CASE("transport objective") {
  const TransportInstance t{{0.5, 0.5}, {0.5, 0.5}};
  CHECK(transport_objective(t, {0.5, 0.0, 0.0, 0.5}) == doctest::Approx(1.0));
  CHECK(transport_objective(t, {0.25, 0.25, 0.25, 0.25}) == doctest::Approx(0.0));
  const TransportInstance u{{0.5, 0.5}, {0.3, 0.7}};
  CHECK(transport_objective(u, {0.15, 0.35, 0.15, 0.35}) == doctest::Approx(0.16));
}

TEST_CASE("assignment brute force") {
  AssignmentInstance a;
  a.cost = {{1, 10}, {10, 1}};
  std::vector<int> perm;
  CHECK(assignment_brute_force(a, &perm) == doctest::Approx(2.0));
  CHECK(perm == std::vector<int>{0, 1});
  a.cost = {{4, 1, 3}, {2, 0.5, 5}, {3, 2, 2}};
  CHECK(assignment_brute_force(a, &perm) == doctest::Approx(5.0));
  CHECK(perm == std::vector<int>{1, 0, 2});
}

TEST_CASE("assignment solve near the brute-force optimum") {
  AssignmentInstance a;
  a.cost = {{4, 1, 3}, {2, 0.5, 5}, {3, 2, 2}};
  SolveOptions opt;
  opt.estimator.n = 10000000;
  opt.estimator.L = 5000;
  opt.estimator.seed = 4;
  const Report r = solve(a, opt);
  CHECK(r.estimate.hits > 0);
  CHECK(r.value == doctest::Approx(5.0).epsilon(0.01));
}

TEST_CASE("entropy maximisation, Shannon, K = 3, q1 >= 1/2") {
  SolveOptions opt;
  opt.estimator.n = 2000;
  opt.estimator.L = 20000;
  opt.estimator.seed = 3;
  const Report r = solve(EntropyMaxInstance{entropy_preset("shannon"), 3, ConstraintSet::halfspace({1, 0, 0}, 0.5)}, opt);
  // -(1/2 log 1/2 + 2 * 1/4 log 1/4)
  CHECK(r.value == doctest::Approx(1.0397207708399179).epsilon(0.03));
}
