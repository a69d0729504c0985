#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsopt {

using Vec = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Bad parameters, mismatched lengths, inadmissible inputs.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An inversion or tilt that is not defined for the given numbers
// (e.g. n too small for the constraint set).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double vsum(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

// log(exp(a) + exp(b)) without overflow; -inf is the neutral element.
inline double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

}  // namespace bsopt
