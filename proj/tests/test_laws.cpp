#include <cmath>

#include "bsopt/legendre.hpp"
#include "bsopt/validation.hpp"
#include "doctest.h"

using namespace bsopt;

TEST_CASE("Philox4x32-10 known answers") {
  using B = Philox::Block;
  CHECK(Philox::bijection(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox::bijection(B{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox::bijection(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("laws of the power family") {
  CHECK(law_for(Generator(PowerGamma{1.0, 1.0})).log_mgf(0.7) == doctest::Approx(std::exp(0.7) - 1.0));
  CHECK(law_for(Generator(PowerGamma{2.0, 1.0})).log_mgf(0.7) == doctest::Approx(0.7 + 0.245));
  CHECK(law_for(Generator(PowerGamma{0.0, 1.0})).log_mgf(0.7) == doctest::Approx(-std::log(0.3)));
  CHECK(law_for(Generator(PowerGamma{0.0, 1.0})).log_mgf(1.2) == kInf);
}

TEST_CASE("every law has mean one and the MGF of its generator") {
  std::uint64_t seed = 7;
  for (const Generator& g : reference_generators()) {
    const WeightLaw law = law_for(g);
    CAPTURE(law.name());
    const double zp = std::min(0.5, 0.25 * law.lambda_plus());
    const MeanOneReport rep = check_mean_one(law, 200000, {0.0, zp}, seed++);
    CHECK(rep.mean_ok);
    CHECK(rep.ok());
  }
}

TEST_CASE("tilted block sampler mean") {
  const WeightLaw law = law_for(Generator(PowerGamma{1.0, 1.0}));
  const double tau = 0.4;
  const BlockSampler s = law.block_sampler(tau, 50);
  // Poisson(n e^tau)
  CHECK(s.mean() == doctest::Approx(50 * std::exp(tau)));
  Rng rng(3, 0);
  double m = 0.0;
  const int N = 20000;
  for (int i = 0; i < N; ++i) m += s(rng);
  CHECK(m / N == doctest::Approx(50 * std::exp(tau)).epsilon(0.01));
}

TEST_CASE("Kolmogorov tail and two-sample test") {
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
  CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
  const KsResult same = ks_two_sample({1, 2, 3}, {3, 2, 1});
  CHECK(same.statistic == 0.0);
  CHECK(same.p_value == doctest::Approx(1.0));
  const KsResult apart = ks_two_sample({1, 2, 3}, {4, 5, 6});
  CHECK(apart.statistic == doctest::Approx(1.0));
  CHECK(apart.p_value == doctest::Approx(0.03262165165202117).epsilon(1e-9));
  const KsResult mixed = ks_two_sample({0.1, 0.4, 0.35, 0.8, 0.9}, {0.2, 0.3, 0.5, 0.6, 0.7, 0.95, 1.2});
  CHECK(mixed.statistic == doctest::Approx(0.3142857142857143));
  CHECK(mixed.p_value == doctest::Approx(0.871218841885176).epsilon(1e-9));
}
