#include "bsopt/laws.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "stable.hpp"

namespace bsopt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Fresh distribution objects per draw: the library ones may cache state
// (normal_distribution keeps a spare value), which would tie a draw to the
// history of the stream.
double draw_normal(double mean, double sd, Rng& rng) { return std::normal_distribution<double>(mean, sd)(rng); }
double draw_gamma(double shape, double rate, Rng& rng) {
  if (shape <= 0.0) return 0.0;
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}
double draw_poisson(double mean, Rng& rng) {
  if (mean <= 0.0) return 0.0;
  return static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
}
double draw_binomial(long trials, double p, Rng& rng) {
  return static_cast<double>(std::binomial_distribution<long long>(trials, p)(rng));
}

// Power-family cumulant function c/g ((1 + z (g-1)/c)^(g/(g-1)) - 1).
double power_lambda(double g, double c, double z) {
  const double base = 1.0 + z * (g - 1.0) / c;
  if (base < 0.0 || (base == 0.0 && g / (g - 1.0) < 0.0)) return kInf;
  return c / g * (std::pow(base, g / (g - 1.0)) - 1.0);
}
double power_lambda_prime(double g, double c, double z) {
  return std::pow(1.0 + z * (g - 1.0) / c, 1.0 / (g - 1.0));
}

double two_point_p(const TwoPointLaw& l) { return (l.z2 - 1.0) / (l.z2 - l.z1); }

// probability of z1 for one elementary two-point variable tilted by u
double two_point_tilted_p(const TwoPointLaw& l, double u) {
  const double p = two_point_p(l);
  const double a = std::log(p) + l.z1 * u, b = std::log1p(-p) + l.z2 * u;
  return 1.0 / (1.0 + std::exp(b - a));
}

double gal_shift(const GenAsymLaplaceLaw& l) { return 1.0 - l.alpha / l.beta1 + l.alpha / l.beta2; }

// Mean-one block laws of exponent form A0 (theta^alpha - (theta - z)^alpha)
// (tilted positive stable).
struct StableParts {
  double alpha, theta, delta;  // Lambda(z) = delta (theta^alpha - (theta - z)^alpha)
};
StableParts tilted_stable_parts(double g, double c) {
  const double alpha = g / (g - 1.0);
  const double theta = c / (1.0 - g);
  return {alpha, theta, -(c / g) * std::pow(theta, -alpha)};
}

// Draws the tilted n-fold sum for Case-1 type exponents.
std::function<double(Rng&)> tilted_stable_block(double g, double c, double tau, long n) {
  const StableParts sp = tilted_stable_parts(g, c);
  const double th = sp.theta - tau;
  const double nd = static_cast<double>(n) * sp.delta;
  if (g == -1.0) {
    // inverse Gaussian in closed form
    const double mu = nd / (2.0 * std::sqrt(th));
    const double shape = 0.5 * nd * nd;
    return [mu, shape](Rng& rng) { return detail::inverse_gaussian(mu, shape, rng); };
  }
  const double cost = std::pow(th, sp.alpha) * nd;
  if (cost <= 50.0) {
    const double sc = std::pow(nd, 1.0 / sp.alpha);
    const double lam = th * sc;
    const double alpha = sp.alpha;
    return [alpha, lam, sc](Rng& rng) { return sc * detail::tilted_positive_stable(alpha, lam, rng); };
  }
  auto table = std::make_shared<const detail::StableInversion>(-nd, th, sp.alpha, -1);
  return [table](Rng& rng) { return (*table)(rng); };
}

std::vector<Atom> lattice_atoms(const auto& dist, double offset, double step, double tail) {
  std::vector<Atom> out;
  for (long long j = 0;; ++j) {
    const double pr = boost::math::pdf(dist, static_cast<double>(j));
    if (pr > 0.0) out.push_back({offset + step * static_cast<double>(j), pr});
    const double rest = boost::math::cdf(boost::math::complement(dist, static_cast<double>(j)));
    if (rest <= tail) break;
    if (j > 100000000) throw NumericError("atoms: support too large to enumerate");
  }
  return out;
}

}  // namespace

WeightLaw::WeightLaw(Variant v) : v_(std::move(v)) {
  std::visit(overloaded{[](const TiltedStable& l) {
                          require(l.gamma < 0.0 && l.scale > 0.0, "tilted stable law: need gamma < 0, scale > 0");
                        },
                        [](const CompoundPoissonGamma& l) {
                          require(l.gamma > 0.0 && l.gamma < 1.0 && l.scale > 0.0,
                                  "compound Poisson-Gamma law: need gamma in ]0,1[, scale > 0");
                        },
                        [](const DistortedStable& l) {
                          require(l.gamma > 2.0 && l.scale > 0.0, "distorted stable law: need gamma > 2, scale > 0");
                        },
                        [](const Gaussian& l) { require(l.scale > 0.0, "Gaussian law: scale must be > 0"); },
                        [](const GammaLaw& l) { require(l.scale > 0.0, "Gamma law: scale must be > 0"); },
                        [](const ScaledPoisson& l) { require(l.scale > 0.0, "Poisson law: scale must be > 0"); },
                        [](const ShiftedPoisson& l) {
                          require(l.scale > 0.0 && std::isfinite(l.anchor), "shifted Poisson law: bad parameters");
                        },
                        [](const ScaledNegBinomial& l) {
                          require(l.alpha > 0.0 && l.scale > 0.0, "negative binomial law: need alpha > 0, scale > 0");
                        },
                        [](const ScaledBinomial& l) {
                          require(l.scale > 0.0 && static_cast<double>(l.m) > l.scale,
                                  "binomial law: need integer m > scale > 0");
                        },
                        [](const ModTiltedStable& l) {
                          require(l.beta > 0.0 && l.beta <= 1.0 && l.scale > 0.0,
                                  "modified tilted stable law: need beta in ]0,1], scale > 0");
                        },
                        [](const TwoPointLaw& l) {
                          require(l.z1 < 1.0 && l.z2 > 1.0 && l.scale >= 1, "two-point law: need z1 < 1 < z2, scale >= 1");
                        },
                        [](const GenAsymLaplaceLaw& l) {
                          require(l.alpha > 0.0 && l.beta1 > 0.0 && l.beta2 > 0.0 && l.scale > 0.0,
                                  "asymmetric Laplace law: all parameters must be > 0");
                        },
                        [](const UserLaw& l) {
                          require(static_cast<bool>(l.sampler) && static_cast<bool>(l.log_mgf),
                                  "user law: sampler and log-MGF are required");
                        }},
             v_);
}

double WeightLaw::lambda_minus() const {
  return std::visit(overloaded{[](const DistortedStable& l) { return -l.scale / (l.gamma - 1.0); },
                               [](const GenAsymLaplaceLaw& l) { return -l.scale * l.beta2; },
                               [](const UserLaw& l) { return l.lo; },
                               [](const auto&) { return -kInf; }},
                    v_);
}

double WeightLaw::lambda_plus() const {
  return std::visit(
      overloaded{[](const TiltedStable& l) { return l.scale / (1.0 - l.gamma); },
                 [](const CompoundPoissonGamma& l) { return l.scale / (1.0 - l.gamma); },
                 [](const GammaLaw& l) { return l.scale; },
                 [](const ScaledNegBinomial& l) { return l.scale * std::log1p(1.0 / l.alpha); },
                 [](const ModTiltedStable& l) { return l.scale / (2.0 * l.beta); },
                 [](const GenAsymLaplaceLaw& l) { return l.scale * l.beta1; },
                 [](const UserLaw& l) { return l.hi; },
                 [](const auto&) { return kInf; }},
      v_);
}

double WeightLaw::log_mgf(double z) const {
  if (z == 0.0) return 0.0;
  if (std::isnan(z)) return kNaN;
  return std::visit(
      overloaded{
          [z](const TiltedStable& l) { return power_lambda(l.gamma, l.scale, z); },
          [z](const CompoundPoissonGamma& l) { return power_lambda(l.gamma, l.scale, z); },
          [z](const DistortedStable& l) { return power_lambda(l.gamma, l.scale, z); },
          [z](const Gaussian& l) { return z + z * z / (2.0 * l.scale); },
          [z](const GammaLaw& l) { return z < l.scale ? -l.scale * std::log1p(-z / l.scale) : kInf; },
          [z](const ScaledPoisson& l) { return l.scale * std::expm1(z / l.scale); },
          [z](const ShiftedPoisson& l) {
            const double ec = std::exp(l.anchor);
            return z * (1.0 - ec) + l.scale * ec * std::expm1(z / l.scale);
          },
          [z](const ScaledNegBinomial& l) {
            const double a = l.alpha;
            const double arg = 1.0 - a * std::expm1(z / l.scale);
            return arg > 0.0 ? -(l.scale / a) * std::log(arg) : kInf;
          },
          [z](const ScaledBinomial& l) {
            const double p = l.scale / static_cast<double>(l.m);
            return static_cast<double>(l.m) * std::log1p(p * std::expm1(z / l.scale));
          },
          [z](const ModTiltedStable& l) {
            const double s = l.scale / (l.beta * l.beta);
            const double y = z / l.beta;
            if (y > 0.5 * s) return kInf;
            return -z * (1.0 / l.beta - 1.0) + s * (1.0 - std::sqrt(1.0 - 2.0 * y / s));
          },
          [z](const TwoPointLaw& l) {
            const double s = static_cast<double>(l.scale), p = two_point_p(l);
            const double u = z / s;
            return s * log_add(std::log(p) + l.z1 * u, std::log1p(-p) + l.z2 * u);
          },
          [z](const GenAsymLaplaceLaw& l) {
            const double c = l.scale;
            if (z >= c * l.beta1 || z <= -c * l.beta2) return kInf;
            return z * gal_shift(l) - c * l.alpha * std::log1p(-z / (c * l.beta1)) -
                   c * l.alpha * std::log1p(z / (c * l.beta2));
          },
          [z](const UserLaw& l) { return (z <= l.lo || z >= l.hi) ? kInf : l.log_mgf(z); }},
      v_);
}

double WeightLaw::log_mgf_prime(double z) const {
  if (!(z > lambda_minus() && z < lambda_plus())) return kNaN;
  return std::visit(
      overloaded{
          [z](const TiltedStable& l) { return power_lambda_prime(l.gamma, l.scale, z); },
          [z](const CompoundPoissonGamma& l) { return power_lambda_prime(l.gamma, l.scale, z); },
          [z](const DistortedStable& l) { return power_lambda_prime(l.gamma, l.scale, z); },
          [z](const Gaussian& l) { return 1.0 + z / l.scale; },
          [z](const GammaLaw& l) { return 1.0 / (1.0 - z / l.scale); },
          [z](const ScaledPoisson& l) { return std::exp(z / l.scale); },
          [z](const ShiftedPoisson& l) {
            const double ec = std::exp(l.anchor);
            return 1.0 - ec + ec * std::exp(z / l.scale);
          },
          [z](const ScaledNegBinomial& l) {
            const double e = std::exp(z / l.scale);
            return e / (1.0 + l.alpha - l.alpha * e);
          },
          [z](const ScaledBinomial& l) {
            const double p = l.scale / static_cast<double>(l.m), e = std::exp(z / l.scale);
            return e / (1.0 - p + p * e);
          },
          [z](const ModTiltedStable& l) {
            const double s = l.scale / (l.beta * l.beta);
            return -(1.0 / l.beta - 1.0) + (1.0 / l.beta) / std::sqrt(1.0 - 2.0 * z / (l.beta * s));
          },
          [z](const TwoPointLaw& l) {
            const double q = two_point_tilted_p(l, z / static_cast<double>(l.scale));
            return q * l.z1 + (1.0 - q) * l.z2;
          },
          [z](const GenAsymLaplaceLaw& l) {
            const double c = l.scale;
            return gal_shift(l) + l.alpha / (l.beta1 - z / c) - l.alpha / (l.beta2 + z / c);
          },
          [z](const UserLaw& l) {
            const double h = 1e-5 * std::max(1.0, std::fabs(z));
            return (l.log_mgf(z + h) - l.log_mgf(z - h)) / (2.0 * h);
          }},
      v_);
}

double WeightLaw::sample(Rng& rng) const {
  if (const auto* u = std::get_if<UserLaw>(&v_)) return u->sampler(rng);
  return block_sampler(0.0, 1)(rng);
}

double WeightLaw::sample_block_sum(long n, Rng& rng) const { return block_sampler(0.0, n)(rng); }

BlockSampler WeightLaw::block_sampler(double tau, long n) const {
  require(n >= 1, "block sampler: block size must be >= 1");
  if (!(tau > lambda_minus() && tau < lambda_plus())) {
    std::ostringstream os;
    os << name() << ": tilt " << tau << " outside the open MGF domain ]" << lambda_minus() << ", " << lambda_plus()
       << "[";
    throw DomainError(os.str());
  }
  const double nd = static_cast<double>(n);
  std::function<double(Rng&)> draw = std::visit(
      overloaded{
          [&](const TiltedStable& l) -> std::function<double(Rng&)> {
            return tilted_stable_block(l.gamma, l.scale, tau, n);
          },
          [&](const CompoundPoissonGamma& l) -> std::function<double(Rng&)> {
            const double th = l.scale / (1.0 - l.gamma), b = l.gamma / (1.0 - l.gamma);
            const double rate = th - tau;
            const double intensity = nd * (l.scale / l.gamma) * std::pow(1.0 - tau / th, -b);
            return [=](Rng& rng) {
              const double N = draw_poisson(intensity, rng);
              return N > 0.0 ? draw_gamma(b * N, rate, rng) : 0.0;
            };
          },
          [&](const DistortedStable& l) -> std::function<double(Rng&)> {
            const double alpha = l.gamma / (l.gamma - 1.0), th = l.scale / (l.gamma - 1.0);
            const double A0 = nd * (l.scale / l.gamma) * std::pow(th, -alpha);
            auto table = std::make_shared<const detail::StableInversion>(A0, th + tau, alpha, +1);
            return [table](Rng& rng) { return (*table)(rng); };
          },
          [&](const Gaussian& l) -> std::function<double(Rng&)> {
            const double m = nd * (1.0 + tau / l.scale), sd = std::sqrt(nd / l.scale);
            return [=](Rng& rng) { return draw_normal(m, sd, rng); };
          },
          [&](const GammaLaw& l) -> std::function<double(Rng&)> {
            const double shape = nd * l.scale, rate = l.scale - tau;
            return [=](Rng& rng) { return draw_gamma(shape, rate, rng); };
          },
          [&](const ScaledPoisson& l) -> std::function<double(Rng&)> {
            const double mean = nd * l.scale * std::exp(tau / l.scale), c = l.scale;
            return [=](Rng& rng) { return draw_poisson(mean, rng) / c; };
          },
          [&](const ShiftedPoisson& l) -> std::function<double(Rng&)> {
            const double s = l.scale, mean = nd * s * std::exp(l.anchor + tau / s);
            const double shift = nd * (1.0 - std::exp(l.anchor));
            return [=](Rng& rng) { return draw_poisson(mean, rng) / s + shift; };
          },
          [&](const ScaledNegBinomial& l) -> std::function<double(Rng&)> {
            const double r = nd * l.scale / l.alpha;
            const double q = l.alpha / (1.0 + l.alpha) * std::exp(tau / l.scale);
            const double gscale = q / (1.0 - q), c = l.scale;
            return [=](Rng& rng) { return draw_poisson(draw_gamma(r, 1.0 / gscale, rng), rng) / c; };
          },
          [&](const ScaledBinomial& l) -> std::function<double(Rng&)> {
            const double p = l.scale / static_cast<double>(l.m), e = std::exp(tau / l.scale);
            const double pt = p * e / (1.0 - p + p * e), c = l.scale;
            const long trials = l.m * n;
            return [=](Rng& rng) { return draw_binomial(trials, pt, rng) / c; };
          },
          [&](const ModTiltedStable& l) -> std::function<double(Rng&)> {
            // sum of (W/beta - (1/beta - 1)) with W inverse Gaussian of scale c/beta^2
            const double s = l.scale / (l.beta * l.beta);
            auto base = tilted_stable_block(-1.0, s, tau / l.beta, n);
            const double ib = 1.0 / l.beta, shift = nd * (ib - 1.0);
            return [=](Rng& rng) { return ib * base(rng) - shift; };
          },
          [&](const TwoPointLaw& l) -> std::function<double(Rng&)> {
            const double s = static_cast<double>(l.scale);
            const double p1 = two_point_tilted_p(l, tau / s);
            const long trials = l.scale * n;
            const double z1 = l.z1, z2 = l.z2;
            return [=](Rng& rng) {
              const double B = draw_binomial(trials, 1.0 - p1, rng);
              return (z1 * (static_cast<double>(trials) - B) + z2 * B) / s;
            };
          },
          [&](const GenAsymLaplaceLaw& l) -> std::function<double(Rng&)> {
            const double c = l.scale, shape = nd * c * l.alpha;
            const double r1 = c * l.beta1 - tau, r2 = c * l.beta2 + tau, shift = nd * gal_shift(l);
            return [=](Rng& rng) {
              const double a = draw_gamma(shape, r1, rng);
              return shift + a - draw_gamma(shape, r2, rng);
            };
          },
          [&](const UserLaw& l) -> std::function<double(Rng&)> {
            if (tau != 0.0) throw DomainError("user law: tilted sampling is not available");
            auto f = l.sampler;
            return [f, n](Rng& rng) {
              double s = 0.0;
              for (long i = 0; i < n; ++i) s += f(rng);
              return s;
            };
          }},
      v_);
  const double lam = log_mgf(tau);
  const double mean = std::holds_alternative<UserLaw>(v_) ? kNaN : nd * log_mgf_prime(tau);
  return BlockSampler(std::move(draw), lam, tau, n, mean);
}

bool WeightLaw::is_discrete() const {
  return std::holds_alternative<ScaledPoisson>(v_) || std::holds_alternative<ShiftedPoisson>(v_) ||
         std::holds_alternative<ScaledNegBinomial>(v_) || std::holds_alternative<ScaledBinomial>(v_) ||
         std::holds_alternative<TwoPointLaw>(v_);
}

std::vector<Atom> WeightLaw::atoms(double tau, long n, double tail) const {
  require(is_discrete(), name() + ": atoms requested for a law without countable support");
  require(n >= 1, "atoms: block size must be >= 1");
  require(tau > lambda_minus() && tau < lambda_plus(), "atoms: tilt outside the MGF domain");
  const double nd = static_cast<double>(n);
  using namespace boost::math;
  return std::visit(
      overloaded{
          [&](const ScaledPoisson& l) {
            return lattice_atoms(poisson_distribution<>(nd * l.scale * std::exp(tau / l.scale)), 0.0, 1.0 / l.scale,
                                 tail);
          },
          [&](const ShiftedPoisson& l) {
            return lattice_atoms(poisson_distribution<>(nd * l.scale * std::exp(l.anchor + tau / l.scale)),
                                 nd * (1.0 - std::exp(l.anchor)), 1.0 / l.scale, tail);
          },
          [&](const ScaledNegBinomial& l) {
            const double q = l.alpha / (1.0 + l.alpha) * std::exp(tau / l.scale);
            return lattice_atoms(negative_binomial_distribution<>(nd * l.scale / l.alpha, 1.0 - q), 0.0,
                                 1.0 / l.scale, tail);
          },
          [&](const ScaledBinomial& l) {
            const double p = l.scale / static_cast<double>(l.m), e = std::exp(tau / l.scale);
            return lattice_atoms(binomial_distribution<>(static_cast<double>(l.m * n), p * e / (1.0 - p + p * e)),
                                 0.0, 1.0 / l.scale, 0.0);
          },
          [&](const TwoPointLaw& l) {
            const double s = static_cast<double>(l.scale);
            const double trials = s * nd;
            const double p1 = two_point_tilted_p(l, tau / s);
            return lattice_atoms(binomial_distribution<>(trials, 1.0 - p1), l.z1 * trials / s, (l.z2 - l.z1) / s,
                                 0.0);
          },
          [](const auto&) -> std::vector<Atom> { return {}; }},
      v_);
}

std::string WeightLaw::name() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const TiltedStable& l) { os << "tilted_stable(gamma=" << l.gamma << ",scale=" << l.scale << ")"; },
                        [&](const CompoundPoissonGamma& l) {
                          os << "compound_poisson_gamma(gamma=" << l.gamma << ",scale=" << l.scale << ")";
                        },
                        [&](const DistortedStable& l) {
                          os << "distorted_stable(gamma=" << l.gamma << ",scale=" << l.scale << ")";
                        },
                        [&](const Gaussian& l) { os << "gaussian(scale=" << l.scale << ")"; },
                        [&](const GammaLaw& l) { os << "gamma(scale=" << l.scale << ")"; },
                        [&](const ScaledPoisson& l) { os << "poisson(scale=" << l.scale << ")"; },
                        [&](const ShiftedPoisson& l) {
                          os << "shifted_poisson(anchor=" << l.anchor << ",scale=" << l.scale << ")";
                        },
                        [&](const ScaledNegBinomial& l) {
                          os << "negative_binomial(alpha=" << l.alpha << ",scale=" << l.scale << ")";
                        },
                        [&](const ScaledBinomial& l) { os << "binomial(m=" << l.m << ",scale=" << l.scale << ")"; },
                        [&](const ModTiltedStable& l) {
                          os << "modified_tilted_stable(beta=" << l.beta << ",scale=" << l.scale << ")";
                        },
                        [&](const TwoPointLaw& l) {
                          os << "two_point(z1=" << l.z1 << ",z2=" << l.z2 << ",scale=" << l.scale << ")";
                        },
                        [&](const GenAsymLaplaceLaw& l) {
                          os << "asym_laplace(alpha=" << l.alpha << ",beta1=" << l.beta1 << ",beta2=" << l.beta2
                             << ",scale=" << l.scale << ")";
                        },
                        [&](const UserLaw&) { os << "user"; }},
             v_);
  return os.str();
}

WeightLaw law_for(const Generator& g) {
  return std::visit(
      overloaded{
          [](const PowerGamma& p) -> WeightLaw {
            const double c = p.scale, y = p.gamma;
            if (y < 0.0) return WeightLaw(TiltedStable{y, c});
            if (y == 0.0) return WeightLaw(GammaLaw{c});
            if (y < 1.0) return WeightLaw(CompoundPoissonGamma{y, c});
            if (y == 1.0) return WeightLaw(ScaledPoisson{c});
            if (y == 2.0) return WeightLaw(Gaussian{c});
            return WeightLaw(DistortedStable{y, c});
          },
          [](const GeneralizedKL& k) -> WeightLaw {
            if (k.alpha > 0.0) return WeightLaw(ScaledNegBinomial{k.alpha, k.scale});
            const double m = -k.scale / k.alpha;
            const double mr = std::round(m);
            if (std::fabs(m - mr) > 1e-9 * std::max(1.0, m))
              throw DomainError("generalized KL with alpha < 0: -scale/alpha must be an integer to be simulable");
            return WeightLaw(ScaledBinomial{static_cast<long>(mr), k.scale});
          },
          [](const AnchoredKL& a) -> WeightLaw { return WeightLaw(ShiftedPoisson{a.anchor, a.scale}); },
          [](const BlendedWeightChiSq& b) -> WeightLaw { return WeightLaw(ModTiltedStable{b.beta, b.scale}); },
          [](const TwoPoint& t) -> WeightLaw {
            const double sr = std::round(t.scale);
            if (std::fabs(t.scale - sr) > 1e-9 * std::max(1.0, t.scale) || sr < 1.0)
              throw DomainError("two-point generator: scale must be a positive integer to be simulable");
            return WeightLaw(TwoPointLaw{t.z1, t.z2, static_cast<long>(sr)});
          },
          [](const GenAsymLaplace& a) -> WeightLaw {
            return WeightLaw(GenAsymLaplaceLaw{a.alpha, a.beta1, a.beta2, a.scale});
          },
          [](const Custom&) -> WeightLaw {
            throw DomainError("custom generator: no built-in simulation law; supply a user law");
          }},
      g.variant());
}

double isf_block_log(const WeightLaw& law, double tau, long n, double x) {
  if (tau == 0.0) return 0.0;
  return static_cast<double>(n) * law.log_mgf(tau) - tau * x;
}

}  // namespace bsopt
