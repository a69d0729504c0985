#include <cmath>

#include "bsopt/oracle.hpp"
#include "doctest.h"

using namespace bsopt;

TEST_CASE("golden section") {
  const GoldenMin g = golden_min([](double x) { return (x - 2.0) * (x - 2.0) + 1.0; }, 0.0, 5.0);
  CHECK(g.x == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(g.fx == doctest::Approx(1.0));
}

TEST_CASE("exact probability for Poisson blocks") {
  // S_1 ~ Poisson(2); P(S_1 >= 5)
  const WeightLaw law = law_for(Generator(PowerGamma{1.0, 1.0}));
  const double p = exact_pi(law, partition({0.5, 0.5}, 4), [](const Vec& s) { return s[0] >= 5.0 - 1e-9; });
  CHECK(p == doctest::Approx(0.052653017343711084).epsilon(1e-9));
}

TEST_CASE("grid minimum on a face") {
  // KL projection onto q1 >= 1/2: q = (1/2, 3/16, 5/16)
  const GridMin g = grid_min_divergence(Generator(PowerGamma{1.0, 1.0}), {0.2, 0.3, 0.5},
                                        ConstraintSet::simplex(3) & ConstraintSet::halfspace({1, 0, 0}, 0.5), 0.01, 5);
  CHECK(g.value == doctest::Approx(0.22314355131420974).epsilon(1e-5));
  CHECK(g.argmin[0] == doctest::Approx(0.5).epsilon(1e-3));
}
