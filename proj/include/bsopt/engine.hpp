#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsopt/common.hpp"
#include "bsopt/divergence.hpp"
#include "bsopt/laws.hpp"
#include "bsopt/rng.hpp"

namespace bsopt {

// ---------------------------------------------------------------- blocks

struct BlockPartition {
  enum class Mode { Deterministic, Empirical };

  long n = 0;
  Vec p;                      // reference probability vector (empirical frequencies in empirical mode)
  std::vector<long> sizes;    // n_k
  std::vector<long> offsets;  // first index of block k
  Mode mode = Mode::Deterministic;
  bool bias_flag = false;     // some n p_k was not an integer
  std::vector<std::string> categories;

  int K() const { return static_cast<int>(sizes.size()); }
};

// n_k = floor(n p_k) for k < K, the last block takes the remainder.
BlockPartition partition(const Vec& p, long n);

// Empirical partition from category labels.  With an explicit category list
// every category must be observed; otherwise the sorted distinct labels are used.
BlockPartition ingest_sample(const std::vector<std::string>& observations,
                             const std::vector<std::string>& categories = {});

struct XiVectors {
  Vec det;                  // block sums / n
  std::optional<Vec> norm;  // block sums / total; empty when the total is 0
};
XiVectors xi_vectors(const Vec& W, const BlockPartition& blocks);

// ---------------------------------------------------------------- constraints

// A membership predicate on R^K plus the mass A of the simplex it lives on
// (simplex mode).  Affine equalities are tested with a tolerance that can be
// widened to a slab so that the set gets an interior.
class ConstraintSet {
 public:
  using Predicate = std::function<bool(const Vec& q, double eq_tol)>;

  struct Equality {
    Vec a;
    double b;
  };

  ConstraintSet(Predicate pred, std::string description, double A = 1.0);

  bool contains(const Vec& q) const { return pred_(q, eq_tol_); }
  double scale() const { return A_; }
  const std::string& description() const { return description_; }
  bool regularity_asserted() const { return regular_; }
  double equality_tolerance() const { return eq_tol_; }
  const std::vector<Equality>& equalities() const { return eqs_; }
  // some equality other than a plain sum is tested with the tolerance, possibly
  // through a pullback where it is no longer affine
  bool tolerance_sensitive() const { return tol_sensitive_; }

  ConstraintSet with_scale(double A) const;
  ConstraintSet with_regularity(bool asserted) const;
  // equalities hold within +-width (never tighter than 1e-9)
  ConstraintSet relaxed(double width) const;
  // {q : f(q) in this set}; eqs are the affine equalities of the new set, if known
  ConstraintSet pullback(std::function<Vec(const Vec&)> f, std::vector<Equality> eqs = {}) const;

  static ConstraintSet everything();
  static ConstraintSet nothing();
  static ConstraintSet halfspace(Vec a, double b);  // a.q >= b
  static ConstraintSet box(Vec lo, Vec hi);
  static ConstraintSet equality(Vec a, double b);
  // q >= 0 and sum q = A; the sum is part of the set's equalities
  static ConstraintSet simplex(int K, double A = 1.0);
  static ConstraintSet from_predicate(std::function<bool(const Vec&)> f, std::string description);

  friend ConstraintSet operator&(const ConstraintSet& x, const ConstraintSet& y);
  friend ConstraintSet operator|(const ConstraintSet& x, const ConstraintSet& y);

 private:
  Predicate pred_;
  std::string description_;
  double A_ = 1.0;
  bool regular_ = true;
  double eq_tol_ = 1e-9;
  std::vector<Equality> eqs_;  // only those that hold on the whole set
  bool tol_sensitive_ = false;
};

// ---------------------------------------------------------------- problem

enum class Mode {
  Deterministic,  // xi_det in Omega / M_P
  Simplex         // A xi_norm in Omega; inversion through inf over m
};

// A divergence minimization inf_{Q in Omega} D_phi(Q, P) prepared for
// simulation: P normalized, phi scaled by M_P, and the matching weight law.
class BsProblem {
 public:
  BsProblem(Generator gen, Vec P, ConstraintSet omega, Mode mode);
  // statistical mode: P is the empirical distribution of the sample
  BsProblem(Generator gen, BlockPartition sample, ConstraintSet omega);

  const Generator& generator() const { return gen_; }
  const Generator& scaled_generator() const { return gen_tilde_; }
  const Vec& P() const { return P_; }
  const Vec& p_tilde() const { return p_; }
  double mass() const { return mass_; }
  int K() const { return static_cast<int>(p_.size()); }
  Mode mode() const { return mode_; }
  const ConstraintSet& omega() const { return omega_; }
  const WeightLaw& law() const;
  bool has_law() const { return law_.has_value(); }
  const std::optional<BlockPartition>& sample() const { return sample_; }

  BlockPartition blocks(long n) const;
  // vector of the original problem corresponding to the block sums S
  std::optional<Vec> to_original(const Vec& block_sums, long n) const;
  bool member_sums(const Vec& block_sums, long n) const;

  // D_phi(Q, P) and, in simplex mode, inf_m D_phi(m Q, P)
  double divergence_of(const Vec& Q) const;
  double objective(const Vec& Q) const;
  double m_of(const Vec& Q, double tol = 1e-10) const;

  // tilts for the dominating point Q (original coordinates)
  Vec tilts(const Vec& Q) const;

  // same problem on another constraint set
  BsProblem with_omega(ConstraintSet omega) const;

  // -(1/n) log Pi mapped to the target quantity
  double invert(double log_pi_hat, long n) const;
  bool exact_inversion() const;

 private:
  Generator gen_, gen_tilde_;
  Vec P_, p_;
  double mass_ = 1.0;
  ConstraintSet omega_;
  Mode mode_;
  std::optional<WeightLaw> law_;
  std::optional<BlockPartition> sample_;
};

// ---------------------------------------------------------------- estimation

enum class ProxyMethod { Given, HitRun, DivergenceDensity };

struct EstimatorConfig {
  long n = 1000;
  long L = 10000;
  std::uint64_t seed = 1;
  ProxyMethod proxy = ProxyMethod::HitRun;
  Vec q_star;                 // used with ProxyMethod::Given
  // Given proxy that depends on the slab width of the equalities; overrides
  // q_star in estimate_slab_limit when set
  std::function<Vec(double width)> q_star_for_width;
  long proxy_M = 0;           // run size for hit runs; 0 picks one from p~
  long proxy_budget = 100000; // runs (hit runs) or thinned draws (density)
  bool refine_proxy = true;
  int batches = 32;
  double bisection_tol = 1e-10;
  double eta_rel = 1e-3;
  int threads = 1;
  bool trace = false;
};

struct Estimate {
  double log_pi_hat = -kInf;
  double value = kInf;
  long hits = 0;
  double stderr_log = kInf;  // standard error of log Pi_hat
  double stderr = kInf;      // propagated to value
  long n = 0, L = 0;
  std::uint64_t seed = 0;
  Vec q_star, tau;
  std::vector<double> trace;  // log Pi_hat after each batch, cumulative
  std::vector<std::string> warnings;

  double hit_rate() const { return L > 0 ? static_cast<double>(hits) / static_cast<double>(L) : 0.0; }
};

Estimate naive_estimate(const BsProblem& prob, const EstimatorConfig& cfg);

// A point of Omega (original coordinates) near the dominating point.
Vec proxy_q_star(const BsProblem& prob, const EstimatorConfig& cfg);

Estimate is_estimate(const BsProblem& prob, const Vec& q_star, const EstimatorConfig& cfg);

// proxy + importance sampling in one call
Estimate estimate(const BsProblem& prob, const EstimatorConfig& cfg);

// Descent on the objective from a point of Omega.
Vec refine_proxy(const BsProblem& prob, Vec q);

// Equalities of omega that simplex mode does not already enforce (anything
// but multiples of the total mass).
bool has_free_equalities(const ConstraintSet& omega);
// Least-squares projection of q onto the affine set of omega's equalities.
Vec project_equalities(const ConstraintSet& omega, const Vec& q);

// Estimate for a problem whose constraint set has affine equalities.  These
// are widened to slabs; with free equalities the estimate is taken at widths
// w and w/2 (common random numbers) and extrapolated linearly to width 0.
struct SlabEstimate {
  Estimate estimate;   // value, stderr: extrapolated; the rest from the w/2 run
  bool extrapolated = false;
  double width = 0.0;
  double wide_value = kNaN, narrow_value = kNaN;
};
SlabEstimate estimate_slab_limit(const BsProblem& prob, const EstimatorConfig& cfg, double width);

enum class InvertMode { Deterministic, SimplexPower };
// Low-level inversion of a rate estimate; c is the scale of the simulated
// generator and A the total mass of the (normalized) constraint set.
double invert(InvertMode mode, const Generator& gen, double A, double log_pi_hat, long n);

struct Bounds {
  double lower = kNaN, upper = kNaN;
  Vec q_hat;
  Estimate estimate;
  std::vector<std::string> warnings;
};
Bounds bounds_general(const BsProblem& prob, const EstimatorConfig& cfg);

// Root of sum_k q_k phi'(m q_k / p_k) = 0 by bisection on [min p/q, max p/q].
double solve_m(const Generator& gen, const Vec& Q, const Vec& P, double tol = 1e-10);

// Pattern search for min f over a constraint set, moving along directions
// that keep the set's equalities (and, if keep_sum, the total mass).
struct DescentResult {
  Vec x;
  double f;
  long evaluations;
  bool stopped_early;  // stop() returned true
};
DescentResult descend(const std::function<double(const Vec&)>& f, const ConstraintSet& omega, Vec x0, bool keep_sum,
                      double tol = 1e-12, long max_evals = 200000,
                      const std::function<bool(const Vec&, double)>& stop = nullptr);

}  // namespace bsopt
