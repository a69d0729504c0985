#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "bsopt/common.hpp"
#include "bsopt/divergence.hpp"

namespace bsopt {

struct KsResult {
  double statistic;  // sup |F1 - F2|
  double p_value;
};
// Two-sample Kolmogorov-Smirnov test with the asymptotic distribution and
// the Stephens small-sample correction.  Values within 1e-9 (relative) are
// treated as ties.
KsResult ks_two_sample(Vec a, Vec b);
// 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2)
double kolmogorov_q(double x);

// One generator per simulation law family, used by the duality and law suites.
std::vector<Generator> reference_generators();

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  int threads = 1;
  std::uint64_t seed = 1;
  std::set<int> only;  // empty: all ten
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance(const ValidationOptions& opt);

std::string format_result(const CriterionResult& r);

}  // namespace bsopt
