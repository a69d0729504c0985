#include "stable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bsopt/common.hpp"

namespace bsopt::detail {

double positive_stable(double alpha, Rng& rng) {
  const double U = std::numbers::pi * rng.uniform();
  const double E = -std::log(rng.uniform());
  const double a = std::sin(alpha * U) / std::pow(std::sin(U), 1.0 / alpha);
  const double b = std::pow(std::sin((1.0 - alpha) * U) / E, (1.0 - alpha) / alpha);
  return a * b;
}

double tilted_positive_stable(double alpha, double lambda, Rng& rng) {
  if (lambda <= 0.0) return positive_stable(alpha, rng);
  const double m = std::max(1.0, std::ceil(std::pow(lambda, alpha)));
  const double shrink = std::pow(m, -1.0 / alpha);
  const double lam = lambda * shrink;
  double sum = 0.0;
  for (long j = 0; j < static_cast<long>(m); ++j) {
    double S;
    do {
      S = positive_stable(alpha, rng);
    } while (-std::log(rng.uniform()) < lam * S);
    sum += S;
  }
  return shrink * sum;
}

double inverse_gaussian(double mu, double lam, Rng& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  const double nu = N(rng);
  const double w = mu * nu * nu / (2.0 * lam);
  const double x = mu / (1.0 + w + std::sqrt(w * (w + 2.0)));
  return rng.uniform() <= mu / (mu + x) ? x : mu * mu / x;
}

// ---------------------------------------------------------------- inversion

StableInversion::StableInversion(double A0, double theta, double alpha, int sigma, int nodes)
    : A0_(A0), theta_(theta), alpha_(alpha), sigma_(sigma) {
  mean_ = sigma_ * A0_ * alpha_ * std::pow(theta_, alpha_ - 1.0);
  sd_ = std::sqrt(A0_ * alpha_ * (alpha_ - 1.0) * std::pow(theta_, alpha_ - 2.0));
  if (!(sd_ > 0.0) || !std::isfinite(mean_)) throw NumericError("stable inversion: degenerate parameters");

  // Push the ends out until the tail mass is negligible or the Bromwich
  // integral stops being trustworthy; beyond the ends the tails are
  // continued exponentially with the local hazard rate.
  const double eps = 1e-11;
  auto trusted = [&](double y, double prev) {
    const double t = tail(y);
    const double f = pdf(y);
    return t > 0.0 && t < prev && f > 0.0 && f / t < 1e3 / sd_;
  };
  double lo = mean_ - 6.0 * sd_;
  if (sigma_ < 0) lo = std::max(lo, 0.5 * mean_);
  for (int k = 0; k < 200 && contour(lo) >= 0.0; ++k) lo = (sigma_ < 0) ? 0.5 * lo : lo - sd_;
  for (int k = 0; k < 200; ++k) {
    const double t = tail(lo);
    if (t <= eps) break;
    const double next = (sigma_ < 0) ? 0.5 * lo : lo - 2.0 * sd_;
    if (!trusted(next, t)) break;
    lo = next;
  }
  double hi = mean_ + 6.0 * sd_;
  for (int k = 0; k < 200 && contour(hi) < 0.0; ++k) hi += sd_;
  for (int k = 0; k < 200; ++k) {
    const double t = tail(hi);
    if (t <= eps) break;
    const double next = hi + 2.0 * sd_;
    if (!trusted(next, t)) break;
    hi = next;
  }

  y_.resize(nodes);
  F_.resize(nodes);
  f_.resize(nodes);
  lF_.resize(nodes);
  lG_.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    // positive support: geometric spacing resolves the steep lower tail
    const double t = static_cast<double>(i) / (nodes - 1);
    y_[i] = (sigma_ < 0) ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    double F = 0.0, G = 1.0;
    if (!(sigma_ < 0 && y_[i] <= 0.0)) {
      const double x = contour(y_[i]);
      const double I = bromwich(y_[i], x, false);
      F = x < 0.0 ? -I : 1.0 - I;
      G = x < 0.0 ? 1.0 + I : I;
    }
    F_[i] = std::clamp(F, 0.0, 1.0);
    lF_[i] = std::log(std::max(F, 1e-300));
    lG_[i] = std::log(std::max(G, 1e-300));
    f_[i] = std::max(pdf(y_[i]), 0.0);
    if (i > 0) F_[i] = std::max(F_[i], F_[i - 1]);
  }
}

std::complex<double> StableInversion::K(std::complex<double> s) const {
  return A0_ * (std::pow(theta_ + static_cast<double>(sigma_) * s, alpha_) - std::pow(theta_, alpha_));
}

double StableInversion::contour(double y) const {
  // saddle point K'(x) = y, kept inside the strip and away from the pole at 0
  const double r = y / (sigma_ * A0_ * alpha_);
  const double edge = 0.98 * theta_;  // |distance| allowed towards the finite strip end
  double x;
  if (r > 0.0) {
    x = sigma_ * (std::pow(r, 1.0 / (alpha_ - 1.0)) - theta_);
  } else {
    x = -sigma_ * edge;
  }
  if (sigma_ > 0) x = std::max(x, -edge);
  else x = std::min(x, edge);
  const double xmin = std::min(0.5 / sd_, 0.5 * edge);
  if (std::fabs(x) < xmin) {
    const double dir = (y >= mean_) ? 1.0 : -1.0;
    x = dir * xmin;
    if (sigma_ > 0 && x < -edge) x = xmin;
    if (sigma_ < 0 && x > edge) x = -xmin;
  }
  return x;
}

// Bromwich integral along Re s = x, with the imaginary axis rescaled by the
// curvature of K at x.  Returns the signed tail: for x < 0 the lower tail,
// for x > 0 the upper tail.
double StableInversion::bromwich(double y, double x, bool density) const {
  const double base = std::real(K(x)) - x * y;
  const double curv = std::sqrt(A0_ * alpha_ * (alpha_ - 1.0) * std::pow(theta_ + sigma_ * x, alpha_ - 2.0));
  auto g = [&](double v) {
    const std::complex<double> s(x, v / curv);
    const std::complex<double> e = std::exp(K(s) - s * y - base);
    return density ? e.real() : (e / s).real();
  };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
             g, 0.0, std::numeric_limits<double>::infinity(), 12, 1e-11, &err) *
         std::exp(base) / (std::numbers::pi * curv);
}

double StableInversion::tail(double y) const {
  if (sigma_ < 0 && y <= 0.0) return 0.0;
  const double x = contour(y);
  const double I = bromwich(y, x, false);
  return x < 0.0 ? -I : I;
}

double StableInversion::cdf(double y) const {
  if (sigma_ < 0 && y <= 0.0) return 0.0;
  const double x = contour(y);
  const double I = bromwich(y, x, false);
  return std::clamp(x < 0.0 ? -I : 1.0 - I, 0.0, 1.0);
}

double StableInversion::pdf(double y) const {
  if (sigma_ < 0 && y <= 0.0) return 0.0;
  return bromwich(y, contour(y), true);
}

namespace {

// y between two nodes as a cubic Hermite function of a monotone coordinate
// v, with dy/dv given at both ends; linear when the cubic leaves the bracket.
double hermite(double v, double v0, double v1, double y0, double y1, double d0, double d1) {
  const double h = v1 - v0;
  const double t = (v - v0) / h;
  const double lin = y0 + t * (y1 - y0);
  if (!std::isfinite(d0) || !std::isfinite(d1)) return lin;
  const double t2 = t * t, t3 = t2 * t;
  const double y = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
                   (t3 - t2) * h * d1;
  return (y >= y0 && y <= y1) ? y : lin;
}

}  // namespace

double StableInversion::quantile(double u) const {
  const size_t N = y_.size();
  if (u <= F_.front()) {
    const double rate = f_.front() / std::exp(lF_.front());
    return rate > 0.0 && std::isfinite(rate) ? y_.front() + (std::log(u) - lF_.front()) / rate : y_.front();
  }
  if (u >= F_.back()) {
    const double rate = f_.back() / std::exp(lG_.back());
    return rate > 0.0 && std::isfinite(rate) ? y_.back() + (lG_.back() - std::log1p(-u)) / rate : y_.back();
  }
  const size_t i = static_cast<size_t>(std::upper_bound(F_.begin(), F_.end(), u) - F_.begin()) - 1;
  if (i + 1 >= N || F_[i + 1] <= F_[i]) return y_[i];
  const double y0 = y_[i], y1 = y_[i + 1], f0 = f_[i], f1 = f_[i + 1];
  if (u < 0.05 && lF_[i + 1] > lF_[i])
    return hermite(std::log(u), lF_[i], lF_[i + 1], y0, y1, std::exp(lF_[i]) / f0, std::exp(lF_[i + 1]) / f1);
  if (u > 0.95 && lG_[i + 1] < lG_[i])
    return hermite(-std::log1p(-u), -lG_[i], -lG_[i + 1], y0, y1, std::exp(lG_[i]) / f0,
                   std::exp(lG_[i + 1]) / f1);
  return hermite(u, F_[i], F_[i + 1], y0, y1, 1.0 / f0, 1.0 / f1);
}

}  // namespace bsopt::detail
