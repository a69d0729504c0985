#pragma once

#include <functional>

#include "bsopt/common.hpp"
#include "bsopt/divergence.hpp"
#include "bsopt/engine.hpp"
#include "bsopt/laws.hpp"

namespace bsopt {

struct GridMin {
  double value = kInf;
  Vec argmin;
  long points = 0;
};

// Scan of the grid A * {i / N : sum i = N}, N = round(1/resolution), over
// the members of omega, then `rounds` local rescans around the best point,
// each 8 times finer.  K <= 4.
GridMin grid_min(const std::function<double(const Vec&)>& f, int K, double A, const ConstraintSet& omega,
                 double resolution, int rounds = 3);
GridMin grid_min_divergence(const Generator& g, const Vec& P, const ConstraintSet& omega, double resolution,
                            int rounds = 3);

// Probability that the untilted block sums of a discrete law hit the set,
// by enumeration of the truncated supports.  Throws if the dropped mass
// exceeds tail.
double exact_pi(const WeightLaw& law, const BlockPartition& blocks, const std::function<bool(const Vec& sums)>& hit,
                double tail = 1e-12);

struct GoldenMin {
  double x, fx;
};
GoldenMin golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

}  // namespace bsopt
