#include "bsopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bsopt {

namespace {

Estimate run(const BsProblem& prob, const SolveOptions& opt) {
  return estimate_slab_limit(prob, opt.estimator, opt.slab).estimate;
}

Report from_estimate(std::string name, const Estimate& est) {
  Report r;
  r.problem = std::move(name);
  r.estimate = est;
  r.divergence = est.value;
  r.warnings = est.warnings;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- quadratic

Vec QuadraticReduction::to_q(const Vec& x) const {
  Vec q(x.size());
  for (size_t k = 0; k < x.size(); ++k) q[k] = -c2[k] * x[k];
  return q;
}

Vec QuadraticReduction::to_x(const Vec& q) const {
  Vec x(q.size());
  for (size_t k = 0; k < q.size(); ++k) x[k] = -q[k] / c2[k];
  return x;
}

QuadraticReduction reduce_quadratic(const QuadraticInstance& inst) {
  const size_t K = inst.c1.size();
  require(K >= 1 && inst.c2.size() == K && inst.c3.size() == K, "quadratic: coefficient vectors differ in length");
  QuadraticReduction r;
  r.c2 = inst.c2;
  r.P.resize(K);
  for (size_t k = 0; k < K; ++k) {
    require(inst.c2[k] != 0.0 && std::isfinite(inst.c2[k]), "quadratic: c2 entries must be nonzero");
    require(inst.c3[k] > 0.0, "quadratic: c3 entries must be > 0");
    r.P[k] = inst.c2[k] * inst.c2[k] / (2.0 * inst.c3[k]);
    r.c4 += inst.c1[k] - inst.c2[k] * inst.c2[k] / (4.0 * inst.c3[k]);
  }
  std::vector<ConstraintSet::Equality> eqs;
  for (const auto& e : inst.omega.equalities()) {
    Vec a(K);
    for (size_t k = 0; k < K; ++k) a[k] = -e.a[k] / inst.c2[k];
    eqs.push_back({a, e.b});
  }
  QuadraticReduction self = r;
  r.omega = inst.omega.pullback([self](const Vec& q) { return self.to_x(q); }, eqs);
  const bool constant_c2 = std::all_of(inst.c2.begin(), inst.c2.end(), [&](double c) { return c == inst.c2[0]; });
  if (inst.total && constant_c2) {
    r.mode = Mode::Simplex;
    r.A = -inst.c2[0] * *inst.total;
    require(r.A != 0.0, "quadratic: the fixed total must be nonzero");
  }
  r.omega = r.omega.with_scale(r.A);
  return r;
}

double quadratic_objective(const QuadraticInstance& inst, const Vec& x) {
  require(x.size() == inst.c1.size(), "quadratic: dimension mismatch");
  double s = 0.0;
  for (size_t k = 0; k < x.size(); ++k) s += inst.c1[k] + inst.c2[k] * x[k] + inst.c3[k] * x[k] * x[k];
  return s;
}

Report solve(const QuadraticInstance& inst, const SolveOptions& opt) {
  const QuadraticReduction red = reduce_quadratic(inst);
  const BsProblem prob(Generator(red.gen), red.P, red.omega, red.mode);
  Report r = from_estimate("quadratic", run(prob, opt));
  r.offset = red.c4;
  r.value = red.c4 + r.divergence;
  return r;
}

// ---------------------------------------------------------------- linear

Vec LinearReduction::to_q(const Vec& x) const {
  Vec q(x.size());
  for (size_t k = 0; k < x.size(); ++k) q[k] = std::pow(x[k], 1.0 / gamma);
  return q;
}

Vec LinearReduction::to_x(const Vec& q) const {
  Vec x(q.size());
  for (size_t k = 0; k < q.size(); ++k) x[k] = q[k] < 0.0 ? kNaN : std::pow(q[k], gamma);
  return x;
}

LinearReduction reduce_linear(const LinearInstance& inst) {
  const double g = inst.gamma;
  require((g > 0.0 && g < 1.0) || g >= 2.0 || g < 0.0, "linear: gamma must be in ]-inf,0[, ]0,1[ or [2,inf[");
  require(!inst.cost.empty(), "linear: empty cost vector");
  require(inst.A > 0.0, "linear: A must be > 0");
  bool nonzero = false;
  for (double c : inst.cost) {
    require(std::isfinite(c) && c >= 0.0, "linear: costs must be finite and nonnegative");
    nonzero = nonzero || c > 0.0;
  }
  require(nonzero, "linear: zero cost vector");
  for (double c : inst.cost) require(c > 0.0, "linear: costs must be > 0");
  LinearReduction r;
  r.gamma = g;
  r.A = inst.A;
  r.maximize = g > 0.0 && g < 1.0;
  const size_t K = inst.cost.size();
  Vec w(K);
  double s = 0.0;
  for (size_t k = 0; k < K; ++k) s += (w[k] = std::pow(inst.cost[k], 1.0 / (1.0 - g)));
  r.P.resize(K);
  for (size_t k = 0; k < K; ++k) r.P[k] = w[k] / s;
  r.c1 = std::pow(s, 1.0 - g);
  LinearReduction self = r;
  r.omega = ConstraintSet::simplex(static_cast<int>(K), inst.A) &
            inst.omega.pullback([self](const Vec& q) { return self.to_x(q); });
  r.omega = r.omega.with_scale(inst.A);
  return r;
}

double linear_objective(const LinearInstance& inst, const Vec& x) {
  require(x.size() == inst.cost.size(), "linear: dimension mismatch");
  double s = 0.0;
  for (size_t k = 0; k < x.size(); ++k) s += x[k] * inst.cost[k];
  return s;
}

Report solve(const LinearInstance& inst, const SolveOptions& opt) {
  const LinearReduction red = reduce_linear(inst);
  const double g = red.gamma;
  const BsProblem prob(Generator(PowerGamma{g, 1.0}), red.P, red.omega, Mode::Simplex);
  Report r = from_estimate(red.maximize ? "linear (maximum)" : "linear (minimum)", run(prob, opt));
  const double H = 1.0 + g * (red.A - 1.0) + g * (g - 1.0) * r.divergence;
  r.value = red.c1 * H;
  return r;
}

// ---------------------------------------------------------------- assignment

AssignmentReduction reduce_assignment(const AssignmentInstance& inst) {
  const int K = static_cast<int>(inst.cost.size());
  require(K >= 1, "assignment: empty cost matrix");
  require(inst.eps1 >= 0.0 && inst.eps2 >= 0.0 && inst.eps1 + inst.eps2 < 1.0,
          "assignment: need eps1, eps2 >= 0 with eps1 + eps2 < 1");
  for (const Vec& row : inst.cost) require(static_cast<int>(row.size()) == K, "assignment: cost matrix must be square");
  AssignmentReduction r;
  r.K = K;
  r.linear.cost = flatten_matrix(inst.cost);
  r.linear.gamma = inst.gamma;
  r.linear.A = K;
  ConstraintSet omega = inst.side;
  for (int i = 0; i < K; ++i) {
    Vec row(K * K, 0.0), col(K * K, 0.0);
    for (int j = 0; j < K; ++j) {
      row[i * K + j] = 1.0;
      col[j * K + i] = 1.0;
    }
    omega = omega & ConstraintSet::equality(row, 1.0) & ConstraintSet::equality(col, 1.0);
  }
  const double e1 = inst.eps1, e2 = inst.eps2;
  omega = omega & ConstraintSet::from_predicate(
                      [e1, e2](const Vec& x) {
                        for (double v : x)
                          if (!((v >= 0.0 && v <= e1) || (v >= 1.0 - e2 && v <= 1.0))) return false;
                        return true;
                      },
                      "polka dot");
  r.linear.omega = omega;
  r.reduction = reduce_linear(r.linear);
  return r;
}

double assignment_brute_force(const AssignmentInstance& inst, std::vector<int>* perm) {
  const int K = static_cast<int>(inst.cost.size());
  require(K >= 1 && K <= 10, "assignment: brute force needs 1 <= K <= 10");
  std::vector<int> p(K);
  std::iota(p.begin(), p.end(), 0);
  double best = kInf;
  do {
    Vec x(K * K, 0.0);
    double c = 0.0;
    for (int i = 0; i < K; ++i) {
      x[i * K + p[i]] = 1.0;
      c += inst.cost[i][p[i]];
    }
    if (inst.side.contains(x) && c < best) {
      best = c;
      if (perm) *perm = p;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

Report solve(const AssignmentInstance& inst, const SolveOptions& opt) {
  const AssignmentReduction red = reduce_assignment(inst);
  SolveOptions o = opt;
  const int K = red.K;
  // Row sums 1 together with sum x^(1/gamma) = K leave only the permutation
  // matrices, so the set has volume only through the slabs and hit runs
  // rarely find it.  Start next to the best admissible permutation: diagonal
  // Q = 1 - a, the rest a/(K-1), with a chosen to centre the point between the
  // polka dot bounds and the row/column slabs.
  if (opt.estimator.proxy == ProxyMethod::HitRun && K >= 2 && K <= 9) {
    std::vector<int> perm;
    if (std::isfinite(assignment_brute_force(inst, &perm))) {
      auto point = [perm, K](double a) {
        Vec q(K * K, a / (K - 1));
        for (int i = 0; i < K; ++i) q[i * K + perm[i]] = 1.0 - a;
        return q;
      };
      const LinearReduction lr = red.reduction;
      const double e1 = inst.eps1, e2 = inst.eps2;
      auto margin = [=](double a, double w) {
        const Vec x = lr.to_x(point(a));
        const double xd = x[perm[0]], xo = x[perm[0] == 0 ? 1 : 0];
        const double row = xd + (K - 1) * xo - 1.0;
        double m = w > 0.0 ? 1.0 - std::fabs(row) / w : (row == 0.0 ? 1.0 : -1.0);
        if (e2 > 0.0) m = std::min(m, std::min(1.0 - xd, xd - 1.0 + e2) / e2);
        if (e1 > 0.0) m = std::min(m, std::min(xo, e1 - xo) / e1);
        return std::isfinite(m) ? m : -kInf;
      };
      const BsProblem base(Generator(PowerGamma{inst.gamma, 1.0}), lr.P, lr.omega, Mode::Simplex);
      auto at_width = [=](double w) {
        double best_a = 0.0, best_m = -kInf;
        for (int i = 1; i < 4000; ++i) {
          const double a = 0.25 * i / 4000.0;
          const double m = margin(a, w);
          if (m > best_m) best_m = m, best_a = a;
        }
        const ConstraintSet om = base.omega().relaxed(w);
        const Vec q = point(best_a);
        return om.contains(q) ? q : point(0.0);
      };
      if (base.omega().relaxed(opt.slab).contains(at_width(opt.slab))) {
        o.estimator.proxy = ProxyMethod::Given;
        o.estimator.q_star = at_width(opt.slab);
        o.estimator.q_star_for_width = at_width;
      }
    }
  }
  Report r = solve(red.linear, o);
  r.problem = "assignment";
  return r;
}

// ---------------------------------------------------------------- transport

TransportReduction reduce_transport(const TransportInstance& inst) {
  const int K1 = static_cast<int>(inst.mu.size()), K2 = static_cast<int>(inst.nu.size());
  require(K1 >= 1 && K2 >= 1, "transport: empty marginal");
  for (double v : inst.mu) require(std::isfinite(v) && v >= 0.0, "transport: mu must be nonnegative");
  for (double v : inst.nu) require(std::isfinite(v) && v >= 0.0, "transport: nu must be nonnegative");
  const double A = vsum(inst.mu);
  require(A > 0.0, "transport: total mass must be > 0");
  require(std::fabs(A - vsum(inst.nu)) <= 1e-12 * std::max(1.0, A), "transport: mu and nu have unequal masses");
  TransportReduction r;
  r.K1 = K1;
  r.K2 = K2;
  r.A = A;
  const int K = K1 * K2;
  r.P.assign(K, 1.0 / K);
  r.quad_offset = 1.0 - 2.0 * A;
  ConstraintSet omega = ConstraintSet::simplex(K, A) & ConstraintSet::box(Vec(K, 0.0), Vec(K, A)) & inst.side;
  for (int u = 0; u < K1; ++u) {
    Vec a(K, 0.0);
    for (int v = 0; v < K2; ++v) a[u * K2 + v] = 1.0;
    omega = omega & ConstraintSet::equality(a, inst.mu[u]);
  }
  for (int v = 0; v < K2; ++v) {
    Vec a(K, 0.0);
    for (int u = 0; u < K1; ++u) a[u * K2 + v] = 1.0;
    omega = omega & ConstraintSet::equality(a, inst.nu[v]);
  }
  r.omega = omega.with_scale(A);
  return r;
}

double transport_objective(const TransportInstance& inst, const Vec& pi) {
  const double K = static_cast<double>(inst.mu.size() * inst.nu.size());
  require(pi.size() == inst.mu.size() * inst.nu.size(), "transport: coupling has the wrong size");
  double s = 0.0;
  for (double x : pi) s += (x - 1.0 / K) * (x - 1.0 / K);
  return K * s;
}

Report solve(const TransportInstance& inst, const SolveOptions& opt) {
  const TransportReduction red = reduce_transport(inst);
  const BsProblem prob(Generator(red.gen), red.P, red.omega, Mode::Simplex);
  Report r = from_estimate("transport", run(prob, opt));
  r.value = r.divergence;
  return r;
}

// ---------------------------------------------------------------- entropy

Report solve(const EntropyMaxInstance& inst, const SolveOptions& opt) {
  require(inst.K >= 2, "entropy: need K >= 2");
  const EntropyForm f = entropy_form(inst.entropy);
  const double g = f.kl_class ? 1.0 : f.gamma;
  const double A = inst.omega.scale();
  const ConstraintSet omega = (ConstraintSet::simplex(inst.K, A) & inst.omega).with_scale(A);
  const BsProblem prob(Generator(PowerGamma{g, 1.0}), Vec(inst.K, 1.0 / inst.K), omega, Mode::Simplex);
  const int dir = entropy_direction(inst.entropy);
  Report r = from_estimate(dir < 0 ? "entropy maximum" : "entropy minimum", run(prob, opt));
  if (dir > 0) r.warnings.push_back("this entropy increases with the divergence; the value is its minimum over Omega");
  if (std::isfinite(r.divergence)) r.value = entropy_from_divergence(inst.entropy, r.divergence, A, inst.K);
  return r;
}

}  // namespace bsopt
