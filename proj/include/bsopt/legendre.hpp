#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "bsopt/common.hpp"
#include "bsopt/divergence.hpp"
#include "bsopt/laws.hpp"

namespace bsopt {

// A strictly increasing smooth F on ]a, b[ (a < 1 < b) and an anchor c in
// the interior of its range.
struct GeneratorSpec {
  std::function<double(double)> F;
  double a = -kInf;
  double b = kInf;
  double anchor = 0.0;
};

// F = phi' with anchor 0 for the built-in generators (the anchored KL uses
// F = s log t with anchor s c).
GeneratorSpec spec_from_generator(const Generator& g);

class CumulantFunction {
 public:
  double operator()(double z) const;  // +inf outside [lambda_-, lambda_+]
  double derivative(double z) const;  // F^{-1}(z + c) + 1 - F^{-1}(c)
  double lambda_minus() const;
  double lambda_plus() const;

  struct Impl;
  explicit CumulantFunction(std::shared_ptr<const Impl> p) : p_(std::move(p)) {}
  const std::shared_ptr<const Impl>& impl() const { return p_; }

 private:
  std::shared_ptr<const Impl> p_;
};

// Throws DomainError if the anchor is outside the range or F fails the
// monotonicity check on its bracketing grid.
CumulantFunction build_lambda(const GeneratorSpec& spec);
Generator build_phi(const GeneratorSpec& spec);

// t -> sup_z (z t - f(z)) over z in ]lo, hi[; +inf when unbounded.
std::function<double(double)> legendre_transform(std::function<double(double)> f, double lo, double hi);

struct MeanOneReport {
  long samples = 0;
  double mean = 0.0, mean_se = 0.0;
  bool mean_ok = true;
  struct Point {
    double z;
    double empirical_mgf, mgf_se;  // estimate of E exp(z W) and its standard error
    double exact_mgf;              // exp(Lambda(z))
    bool ok;
  };
  std::vector<Point> points;
  bool ok() const;
};

// Empirical mean and exponential moments of the law against 1 and
// exp(Lambda(z)); a point is flagged when it is off by more than k standard errors.
MeanOneReport check_mean_one(const WeightLaw& law, long N, const Vec& z, std::uint64_t seed, double k = 4.0);

}  // namespace bsopt
