#pragma once

#include <functional>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "bsopt/common.hpp"
#include "bsopt/divergence.hpp"
#include "bsopt/rng.hpp"

namespace bsopt {

// Positive stable with index gamma/(gamma-1) in ]0,1[, exponentially tilted.
struct TiltedStable { double gamma = -1.0, scale = 1.0; };
// Poisson number of Gamma summands.
struct CompoundPoissonGamma { double gamma = 0.5, scale = 1.0; };
// Totally skewed stable with index gamma/(gamma-1) in ]1,2[, exponentially distorted.
struct DistortedStable { double gamma = 3.0, scale = 1.0; };
struct Gaussian { double scale = 1.0; };
struct GammaLaw { double scale = 1.0; };
struct ScaledPoisson { double scale = 1.0; };
struct ShiftedPoisson { double anchor = 0.0, scale = 1.0; };
struct ScaledNegBinomial { double alpha = 1.0, scale = 1.0; };
struct ScaledBinomial { long m = 2; double scale = 1.0; };
struct ModTiltedStable { double beta = 1.0, scale = 1.0; };
struct TwoPointLaw { double z1 = 0.0, z2 = 2.0; long scale = 1; };
struct GenAsymLaplaceLaw { double alpha = 1.0, beta1 = 1.0, beta2 = 1.0, scale = 1.0; };
// Law supplied by the caller; only plain draws and n-fold summation.
struct UserLaw {
  std::function<double(Rng&)> sampler;
  std::function<double(double)> log_mgf;
  double lo = -kInf, hi = kInf;
};

// One draw of the n-fold sum of a law tilted by tau, plus its
// importance-sampling factor.  Built once per (tau, n) and reused.
class BlockSampler {
 public:
  BlockSampler() = default;
  BlockSampler(std::function<double(Rng&)> draw, double log_mgf_tau, double tau, long n, double mean)
      : draw_(std::move(draw)), lam_tau_(log_mgf_tau), tau_(tau), n_(n), mean_(mean) {}

  double operator()(Rng& rng) const { return draw_(rng); }
  // log ISF(x) = n Lambda(tau) - tau x
  double log_isf(double x) const { return tau_ == 0.0 ? 0.0 : static_cast<double>(n_) * lam_tau_ - tau_ * x; }
  double tau() const { return tau_; }
  long count() const { return n_; }
  double mean() const { return mean_; }

 private:
  std::function<double(Rng&)> draw_;
  double lam_tau_ = 0.0, tau_ = 0.0;
  long n_ = 1;
  double mean_ = 0.0;
};

struct Atom {
  double value;
  double prob;
};

class WeightLaw {
 public:
  using Variant = std::variant<TiltedStable, CompoundPoissonGamma, DistortedStable, Gaussian, GammaLaw,
                               ScaledPoisson, ShiftedPoisson, ScaledNegBinomial, ScaledBinomial,
                               ModTiltedStable, TwoPointLaw, GenAsymLaplaceLaw, UserLaw>;

  WeightLaw(Variant v);  // NOLINT

  double log_mgf(double z) const;          // +inf outside the domain
  double log_mgf_prime(double z) const;    // mean of the tilted law
  double lambda_minus() const;             // open MGF domain ]lambda_-, lambda_+[
  double lambda_plus() const;

  // one-off draws; they set up a sampler on every call, use block_sampler in loops
  double sample(Rng& rng) const;
  double sample_block_sum(long n, Rng& rng) const;
  BlockSampler block_sampler(double tau, long n) const;

  bool is_discrete() const;
  // atoms of the tilted n-fold sum, truncated once the dropped mass is below tail
  std::vector<Atom> atoms(double tau, long n, double tail) const;

  const Variant& variant() const { return v_; }
  std::string name() const;

 private:
  Variant v_;
};

// The simulation law whose log-MGF is the convex conjugate of g.
WeightLaw law_for(const Generator& g);

// log ISF for one block: n Lambda(tau) - tau x
double isf_block_log(const WeightLaw& law, double tau, long n, double x);

}  // namespace bsopt
