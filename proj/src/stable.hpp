#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "bsopt/rng.hpp"

namespace bsopt::detail {

// Standard positive stable, E exp(-s S) = exp(-s^alpha), alpha in ]0,1[.
double positive_stable(double alpha, Rng& rng);

// Positive stable with Laplace exponent (lambda + s)^alpha - lambda^alpha.
// Splits into m = ceil(lambda^alpha) infinitely divisible pieces, each drawn
// by plain rejection with acceptance exp(-lambda^alpha / m) >= 1/e.
double tilted_positive_stable(double alpha, double lambda, Rng& rng);

// Inverse Gaussian with mean mu and shape lam (Michael, Schucany & Haas).
double inverse_gaussian(double mu, double lam, Rng& rng);

// Sampling by numerical inversion of a CDF obtained from the cumulant
// function K(s) = A0 ((theta + sigma s)^alpha - theta^alpha) through a
// saddle-point-shifted Bromwich integral.  Used for the stable families when
// no exact rejection scheme is cheap.
class StableInversion {
 public:
  StableInversion(double A0, double theta, double alpha, int sigma, int nodes = 512);

  double cdf(double y) const;
  double pdf(double y) const;
  double quantile(double u) const;
  double operator()(Rng& rng) const { return quantile(rng.uniform()); }
  double mean() const { return mean_; }
  double sd() const { return sd_; }

 private:
  std::complex<double> K(std::complex<double> s) const;
  double contour(double y) const;  // abscissa used for the Bromwich integral at y
  double bromwich(double y, double x, bool density) const;
  double tail(double y) const;

  double A0_, theta_, alpha_;
  int sigma_;
  double mean_, sd_;
  std::vector<double> y_, F_, f_, lF_, lG_;
};

}  // namespace bsopt::detail
