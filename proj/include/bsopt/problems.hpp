#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bsopt/divergence.hpp"
#include "bsopt/engine.hpp"

namespace bsopt {

// ---------------------------------------------------------------- quadratic

// min over x in omega of sum_k c1_k + c2_k x_k + c3_k x_k^2
struct QuadraticInstance {
  Vec c1, c2, c3;
  ConstraintSet omega = ConstraintSet::everything();
  // set when omega fixes sum x = total and c2 is constant
  std::optional<double> total;
};

struct QuadraticReduction {
  PowerGamma gen{2.0, 1.0};
  Vec P;            // c2^2 / (2 c3)
  double c4 = 0.0;  // objective = c4 + D(Q, P)
  Vec c2;
  ConstraintSet omega = ConstraintSet::everything();  // on Q = -c2 x
  Mode mode = Mode::Deterministic;
  double A = 1.0;   // total mass of Q in simplex mode (may be < 0)

  Vec to_q(const Vec& x) const;
  Vec to_x(const Vec& q) const;
};

QuadraticReduction reduce_quadratic(const QuadraticInstance& inst);
double quadratic_objective(const QuadraticInstance& inst, const Vec& x);

// ---------------------------------------------------------------- linear

// sum_k x_k c_k over nonnegative x with sum x^(1/gamma) = A and x in omega
struct LinearInstance {
  Vec cost;
  double gamma = 2.0;
  double A = 1.0;
  ConstraintSet omega = ConstraintSet::everything();  // on x
};

struct LinearReduction {
  double gamma = 2.0;
  Vec P;          // probability vector
  double c1 = 1;  // sum x c = c1 * H_gamma(Q, P)
  double A = 1.0;
  bool maximize = false;  // gamma in ]0,1[
  ConstraintSet omega = ConstraintSet::everything();  // on Q = x^(1/gamma), mass A

  Vec to_q(const Vec& x) const;
  Vec to_x(const Vec& q) const;
};

LinearReduction reduce_linear(const LinearInstance& inst);
double linear_objective(const LinearInstance& inst, const Vec& x);

// ---------------------------------------------------------------- assignment

struct AssignmentInstance {
  std::vector<Vec> cost;  // K x K, entries > 0
  double eps1 = 0.05, eps2 = 0.05;
  double gamma = 2.0;
  ConstraintSet side = ConstraintSet::everything();  // on the flattened x
};

struct AssignmentReduction {
  int K = 0;
  LinearInstance linear;
  LinearReduction reduction;
};

AssignmentReduction reduce_assignment(const AssignmentInstance& inst);
// discrete optimum over permutations admitted by the side constraints
double assignment_brute_force(const AssignmentInstance& inst, std::vector<int>* perm = nullptr);

// ---------------------------------------------------------------- transport

struct TransportInstance {
  Vec mu, nu;
  ConstraintSet side = ConstraintSet::everything();  // on the flattened coupling
};

struct TransportReduction {
  PowerGamma gen{2.0, 2.0};
  Vec P;        // uniform over K1 K2 cells
  double A = 1.0;
  // objective = D(Q, P) = K1 K2 sum q^2 + quad_offset
  double quad_offset = 0.0;
  int K1 = 0, K2 = 0;
  ConstraintSet omega = ConstraintSet::everything();
};

TransportReduction reduce_transport(const TransportInstance& inst);
double transport_objective(const TransportInstance& inst, const Vec& coupling);

// ---------------------------------------------------------------- solving

struct SolveOptions {
  EstimatorConfig estimator;
  // relative width given to affine equalities; with equalities other than the
  // total mass the value is extrapolated from widths slab and slab/2
  double slab = 0.01;
};

struct Report {
  std::string problem;
  double value = kNaN;       // optimum on the original scale
  double divergence = kNaN;  // estimated D(Omega, P) behind it
  double offset = 0.0;
  Estimate estimate;
  std::vector<std::string> warnings;
};

Report solve(const QuadraticInstance& inst, const SolveOptions& opt);
Report solve(const LinearInstance& inst, const SolveOptions& opt);
Report solve(const AssignmentInstance& inst, const SolveOptions& opt);
Report solve(const TransportInstance& inst, const SolveOptions& opt);

// Extremum of an entropy over omega (a subset of A times the simplex):
// the maximum for entropies that decrease with D(Q, uniform), else the minimum.
struct EntropyMaxInstance {
  EntropySpec entropy;
  int K = 2;
  ConstraintSet omega = ConstraintSet::everything();  // scale() is A
};
Report solve(const EntropyMaxInstance& inst, const SolveOptions& opt);

}  // namespace bsopt
