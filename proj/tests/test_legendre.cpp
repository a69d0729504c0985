#include <cmath>

#include "bsopt/legendre.hpp"
#include "bsopt/validation.hpp"
#include "doctest.h"

using namespace bsopt;

TEST_CASE("cumulant functions of the power family") {
  const double z = 0.3;
  // conjugates of phi_1, phi_2, phi_0
  CHECK(build_lambda(spec_from_generator(Generator(PowerGamma{1.0, 1.0})))(z) ==
        doctest::Approx(std::exp(z) - 1.0).epsilon(1e-9));
  CHECK(build_lambda(spec_from_generator(Generator(PowerGamma{2.0, 1.0})))(z) ==
        doctest::Approx(z + z * z / 2).epsilon(1e-9));
  CHECK(build_lambda(spec_from_generator(Generator(PowerGamma{0.0, 1.0})))(z) ==
        doctest::Approx(-std::log(1.0 - z)).epsilon(1e-9));
  const CumulantFunction lam0 = build_lambda(spec_from_generator(Generator(PowerGamma{0.0, 1.0})));
  CHECK(lam0.lambda_plus() == doctest::Approx(1.0));
  CHECK(lam0(1.5) == kInf);
}

TEST_CASE("numeric Legendre transform of x^2/2") {
  const auto f = legendre_transform([](double x) { return 0.5 * x * x; }, -10.0, 10.0);
  for (double y : {-2.0, 0.0, 0.5, 3.0}) CHECK(f(y) == doctest::Approx(0.5 * y * y).epsilon(1e-8));
}

TEST_CASE("phi rebuilt from its cumulant function") {
  for (const Generator& g : reference_generators()) {
    CAPTURE(g.name());
    const Generator back = build_phi(spec_from_generator(g));
    const double lo = std::isfinite(g.lower()) ? g.lower() : -3.0, hi = std::isfinite(g.upper()) ? g.upper() : 4.0;
    for (int i = 1; i < 10; ++i) {
      const double t = lo + (hi - lo) * i / 10.0;
      CHECK(back(t) == doctest::Approx(g(t)).epsilon(1e-7));
    }
  }
}
