#include <cmath>

#include "bsopt/divergence.hpp"
#include "doctest.h"

using namespace bsopt;

TEST_CASE("power generators at t = 1 and their slopes") {
  for (double g : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0}) {
    const Generator f(PowerGamma{g, 1.0});
    CHECK(f(1.0) == doctest::Approx(0.0));
    CHECK(f.derivative(1.0) == doctest::Approx(0.0));
  }
  const Generator kl(PowerGamma{1.0, 1.0});
  CHECK(kl(2.0) == doctest::Approx(2.0 * std::log(2.0) - 1.0));
  const Generator chi(PowerGamma{2.0, 1.0});
  CHECK(chi(3.0) == doctest::Approx(2.0));
}

TEST_CASE("divergence values") {
  const Vec P{0.3, 0.3, 0.4}, Q{0.4, 0.1, 0.7};
  // scipy-evaluated sums of p phi(q/p)
  CHECK(divergence(Generator(PowerGamma{-1.0, 1.0}), Q, P) == doctest::Approx(0.2767857142857142).epsilon(1e-12));
  CHECK(divergence(Generator(PowerGamma{0.0, 1.0}), Q, P) == doctest::Approx(0.21943274969072957).epsilon(1e-12));
  CHECK(divergence(Generator(PowerGamma{0.5, 1.0}), Q, P) == doctest::Approx(0.20493798206567462).epsilon(1e-12));
  CHECK(divergence(Generator(PowerGamma{1.0, 1.0}), Q, P) == doctest::Approx(0.1969426516686972).epsilon(1e-12));
  CHECK(divergence(Generator(PowerGamma{2.0, 1.0}), Q, P) == doctest::Approx(0.19583333333333325).epsilon(1e-12));
  CHECK(divergence(Generator(PowerGamma{3.0, 1.0}), Q, P) == doctest::Approx(0.21099537037037036).epsilon(1e-12));
  CHECK(divergence(Generator(PowerGamma{2.0, 3.0}), Q, P) == doctest::Approx(3 * 0.19583333333333325));
}

TEST_CASE("closed-form minimum over the scale m") {
  const Vec P{0.3, 0.3, 0.4}, Q{0.4, 0.1, 0.7};
  struct Row {
    double g, value, m;
  };
  // bounded scalar minimisation of m -> D(mQ, P)
  for (const Row& r : {Row{-1, 0.27447468169662514, 1.0620622351135003}, Row{0, 0.2017543064846841, 0.8333333331785255},
                       Row{0.5, 0.16681819434216516, 0.7638257635769019}, Row{1, 0.1379689484291926, 0.7183592096722152},
                       Row{2, 0.09813953488372094, 0.6697674418604658}, Row{3, 0.07450332521227018, 0.6470750207086242}}) {
    CAPTURE(r.g);
    const MinOverM mm = min_over_m_closed(PowerGamma{r.g, 1.0}, Q, P);
    CHECK(mm.value == doctest::Approx(r.value).epsilon(1e-10));
    CHECK(mm.m == doctest::Approx(r.m).epsilon(1e-7));
  }
}

TEST_CASE("forward and inverse maps round trip") {
  for (double g : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0})
    for (double A : {0.5, 1.0, 2.0})
      for (double D : {0.0, 0.01, 0.1, 0.3}) {
        const PowerGamma pg{g, 1.0};
        const double D0 = D + Generator(pg)(A);
        CHECK(min_over_m_inverse(pg, min_over_m_forward(pg, D0, A), A) == doctest::Approx(D0).epsilon(1e-12));
      }
}

TEST_CASE("Shannon entropy of the uniform vector") {
  const EntropySpec e = entropy_preset("shannon");
  CHECK(entropy(e, {1.0 / 3, 1.0 / 3, 1.0 / 3}) == doctest::Approx(std::log(3.0)));
  CHECK_THROWS_AS(entropy_preset("no-such-entropy"), DomainError);
}

TEST_CASE("matrix flattening is row major") {
  const std::vector<Vec> X{{1, 2, 3}, {4, 5, 6}};
  const Vec x = flatten_matrix(X);
  CHECK(x == Vec{1, 2, 3, 4, 5, 6});
  CHECK(unflatten_matrix(x, 2, 3) == X);
}
