#include "bsopt/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

namespace bsopt {

// ---------------------------------------------------------------- blocks

BlockPartition partition(const Vec& p, long n) {
  require(!p.empty(), "partition: empty reference vector");
  require(n >= 1, "partition: n must be >= 1");
  double s = 0.0;
  for (double x : p) {
    require(std::isfinite(x) && x > 0.0, "partition: reference probabilities must be > 0");
    s += x;
  }
  require(std::fabs(s - 1.0) < 1e-9, "partition: reference vector must sum to 1");

  BlockPartition bp;
  bp.n = n;
  bp.p = p;
  const int K = static_cast<int>(p.size());
  long used = 0;
  for (int k = 0; k < K; ++k) {
    const double x = static_cast<double>(n) * p[k];
    if (std::fabs(x - std::round(x)) > 1e-9 * std::max(1.0, x)) bp.bias_flag = true;
    const long nk = (k + 1 < K) ? static_cast<long>(std::floor(x + 1e-9)) : n - used;
    if (nk < 1) {
      std::ostringstream os;
      os << "partition: n = " << n << " leaves block " << k + 1 << " empty; need n >= ceil(1/p_k) for all k";
      throw DomainError(os.str());
    }
    bp.offsets.push_back(used);
    bp.sizes.push_back(nk);
    used += nk;
  }
  return bp;
}

BlockPartition ingest_sample(const std::vector<std::string>& observations, const std::vector<std::string>& categories) {
  require(!observations.empty(), "ingest_sample: no observations");
  std::map<std::string, long> counts;
  for (const auto& o : observations) ++counts[o];
  std::vector<std::string> cats = categories;
  if (cats.empty()) {
    for (const auto& [c, _] : counts) cats.push_back(c);
  } else {
    for (const auto& [c, _] : counts)
      require(std::find(cats.begin(), cats.end(), c) != cats.end(), "ingest_sample: unknown category '" + c + "'");
  }
  BlockPartition bp;
  bp.mode = BlockPartition::Mode::Empirical;
  bp.n = static_cast<long>(observations.size());
  bp.categories = cats;
  long used = 0;
  for (const auto& c : cats) {
    const auto it = counts.find(c);
    require(it != counts.end(), "ingest_sample: category '" + c + "' has no observations");
    bp.offsets.push_back(used);
    bp.sizes.push_back(it->second);
    bp.p.push_back(static_cast<double>(it->second) / static_cast<double>(bp.n));
    used += it->second;
  }
  return bp;
}

XiVectors xi_vectors(const Vec& W, const BlockPartition& blocks) {
  require(static_cast<long>(W.size()) == blocks.n, "xi_vectors: need one weight per index");
  const int K = blocks.K();
  Vec S(K, 0.0);
  for (int k = 0; k < K; ++k)
    for (long i = 0; i < blocks.sizes[k]; ++i) S[k] += W[blocks.offsets[k] + i];
  XiVectors out;
  out.det.resize(K);
  const double total = vsum(S);
  for (int k = 0; k < K; ++k) out.det[k] = S[k] / static_cast<double>(blocks.n);
  if (total != 0.0) {
    Vec nrm(K);
    for (int k = 0; k < K; ++k) nrm[k] = S[k] / total;
    out.norm = std::move(nrm);
  }
  return out;
}

// ---------------------------------------------------------------- constraints

ConstraintSet::ConstraintSet(Predicate pred, std::string description, double A)
    : pred_(std::move(pred)), description_(std::move(description)), A_(A) {}

ConstraintSet ConstraintSet::with_scale(double A) const {
  ConstraintSet c = *this;
  c.A_ = A;
  return c;
}

ConstraintSet ConstraintSet::with_regularity(bool asserted) const {
  ConstraintSet c = *this;
  c.regular_ = asserted;
  return c;
}

ConstraintSet ConstraintSet::relaxed(double width) const {
  ConstraintSet c = *this;
  c.eq_tol_ = std::max(1e-9, width);
  return c;
}

ConstraintSet ConstraintSet::pullback(std::function<Vec(const Vec&)> f, std::vector<Equality> eqs) const {
  ConstraintSet c = *this;
  c.pred_ = [p = pred_, f = std::move(f)](const Vec& q, double tol) { return p(f(q), tol); };
  c.tol_sensitive_ = tol_sensitive_ || !eqs_.empty();
  c.eqs_ = std::move(eqs);
  return c;
}

ConstraintSet ConstraintSet::everything() {
  return {[](const Vec&, double) { return true; }, "everything"};
}

ConstraintSet ConstraintSet::nothing() {
  return {[](const Vec&, double) { return false; }, "empty set"};
}

namespace {

double dot(const Vec& a, const Vec& q) {
  require(a.size() == q.size(), "constraint: dimension mismatch");
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * q[k];
  return s;
}

std::string vec_str(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

}  // namespace

ConstraintSet ConstraintSet::halfspace(Vec a, double b) {
  std::string d = vec_str(a) + ".q >= " + std::to_string(b);
  return {[a = std::move(a), b](const Vec& q, double) { return dot(a, q) >= b; }, d};
}

ConstraintSet ConstraintSet::box(Vec lo, Vec hi) {
  require(lo.size() == hi.size(), "box: bound vectors differ in length");
  std::string d = "box " + vec_str(lo) + " .. " + vec_str(hi);
  return {[lo = std::move(lo), hi = std::move(hi)](const Vec& q, double) {
            require(q.size() == lo.size(), "box: dimension mismatch");
            for (size_t k = 0; k < q.size(); ++k)
              if (!(q[k] >= lo[k] && q[k] <= hi[k])) return false;
            return true;
          },
          d};
}

ConstraintSet ConstraintSet::equality(Vec a, double b) {
  std::string d = vec_str(a) + ".q = " + std::to_string(b);
  const double scale = std::max(1.0, std::fabs(b));
  ConstraintSet c{[a, b, scale](const Vec& q, double tol) { return std::fabs(dot(a, q) - b) <= tol * scale; }, d};
  c.tol_sensitive_ = std::any_of(a.begin(), a.end(), [&](double v) { return v != a[0]; });
  c.eqs_.push_back({std::move(a), b});
  return c;
}

ConstraintSet ConstraintSet::simplex(int K, double A) {
  require(K >= 1 && A != 0.0, "simplex: need K >= 1 and A != 0");
  const double sgn = A > 0.0 ? 1.0 : -1.0;
  ConstraintSet c = equality(Vec(K, 1.0), A);
  ConstraintSet sign{[sgn](const Vec& q, double) {
                       for (double x : q)
                         if (sgn * x < 0.0) return false;
                       return true;
                     },
                     "sign"};
  ConstraintSet out = c & sign;
  out.description_ = "simplex(K=" + std::to_string(K) + ", A=" + std::to_string(A) + ")";
  out.A_ = A;
  return out;
}

ConstraintSet ConstraintSet::from_predicate(std::function<bool(const Vec&)> f, std::string description) {
  return {[f = std::move(f)](const Vec& q, double) { return f(q); }, std::move(description)};
}

ConstraintSet operator&(const ConstraintSet& x, const ConstraintSet& y) {
  ConstraintSet c{[px = x.pred_, py = y.pred_](const Vec& q, double tol) { return px(q, tol) && py(q, tol); },
                  "(" + x.description_ + ") and (" + y.description_ + ")", x.A_ != 1.0 ? x.A_ : y.A_};
  c.regular_ = x.regular_ && y.regular_;
  c.eq_tol_ = std::max(x.eq_tol_, y.eq_tol_);
  c.tol_sensitive_ = x.tol_sensitive_ || y.tol_sensitive_;
  c.eqs_ = x.eqs_;
  c.eqs_.insert(c.eqs_.end(), y.eqs_.begin(), y.eqs_.end());
  return c;
}

ConstraintSet operator|(const ConstraintSet& x, const ConstraintSet& y) {
  ConstraintSet c{[px = x.pred_, py = y.pred_](const Vec& q, double tol) { return px(q, tol) || py(q, tol); },
                  "(" + x.description_ + ") or (" + y.description_ + ")", x.A_ != 1.0 ? x.A_ : y.A_};
  c.regular_ = x.regular_ && y.regular_;
  c.eq_tol_ = std::max(x.eq_tol_, y.eq_tol_);
  c.tol_sensitive_ = x.tol_sensitive_ || y.tol_sensitive_;
  for (const auto& e : x.eqs_)
    for (const auto& f : y.eqs_)
      if (e.a == f.a && e.b == f.b) c.eqs_.push_back(e);
  return c;
}

// ---------------------------------------------------------------- problem

BsProblem::BsProblem(Generator gen, Vec P, ConstraintSet omega, Mode mode)
    : gen_(gen), gen_tilde_(gen), P_(std::move(P)), omega_(std::move(omega)), mode_(mode) {
  for (double p : P_) require(std::isfinite(p) && p > 0.0, "reference vector entries must be > 0");
  const Normalized nb = normalize_bs1(P_);
  p_ = nb.p;
  mass_ = nb.mass;
  gen_tilde_ = gen_.scaled(mass_);
  try {
    law_ = law_for(gen_tilde_);
  } catch (const DomainError&) {
    law_.reset();
  }
}

BsProblem::BsProblem(Generator gen, BlockPartition sample, ConstraintSet omega)
    : BsProblem(gen, sample.p, std::move(omega), Mode::Simplex) {
  require(sample.mode == BlockPartition::Mode::Empirical, "statistical mode needs an empirical partition");
  sample_ = std::move(sample);
}

BsProblem BsProblem::with_omega(ConstraintSet omega) const {
  BsProblem p(*this);
  p.omega_ = std::move(omega);
  return p;
}

const WeightLaw& BsProblem::law() const {
  if (!law_) (void)law_for(gen_tilde_);  // rethrows the reason
  return *law_;
}

BlockPartition BsProblem::blocks(long n) const {
  if (sample_) return *sample_;
  return partition(p_, n);
}

std::optional<Vec> BsProblem::to_original(const Vec& S, long n) const {
  const size_t K = S.size();
  Vec Q(K);
  if (mode_ == Mode::Deterministic) {
    for (size_t k = 0; k < K; ++k) Q[k] = mass_ * S[k] / static_cast<double>(n);
    return Q;
  }
  const double total = vsum(S);
  if (total == 0.0 || !std::isfinite(total)) return std::nullopt;
  const double A = omega_.scale();
  for (size_t k = 0; k < K; ++k) Q[k] = A * (S[k] / total);
  return Q;
}

bool BsProblem::member_sums(const Vec& S, long n) const {
  const auto Q = to_original(S, n);
  return Q && omega_.contains(*Q);
}

double BsProblem::divergence_of(const Vec& Q) const { return divergence(gen_, Q, P_); }

double BsProblem::m_of(const Vec& Q, double tol) const {
  if (gen_.is_power()) return min_over_m_closed(std::get<PowerGamma>(gen_.variant()), Q, P_).m;
  return solve_m(gen_, Q, P_, tol);
}

double BsProblem::objective(const Vec& Q) const {
  if (mode_ == Mode::Deterministic) return divergence_of(Q);
  try {
    if (gen_.is_power()) return min_over_m_closed(std::get<PowerGamma>(gen_.variant()), Q, P_).value;
    const double m = solve_m(gen_, Q, P_);
    Vec mQ = Q;
    for (double& x : mQ) x *= m;
    return divergence_of(mQ);
  } catch (const DomainError&) {
    return kInf;
  }
}

Vec BsProblem::tilts(const Vec& Q) const {
  require(static_cast<int>(Q.size()) == K(), "tilts: dimension mismatch");
  const double m = (mode_ == Mode::Simplex) ? m_of(Q) : 1.0;
  Vec tau(K());
  for (int k = 0; k < K(); ++k) tau[k] = gen_tilde_.derivative(m * Q[k] / mass_ / p_[k]);
  return tau;
}

bool BsProblem::exact_inversion() const { return mode_ == Mode::Deterministic || gen_.is_power(); }

double invert(InvertMode mode, const Generator& gen, double A, double log_pi_hat, long n) {
  require(n >= 1, "invert: n must be >= 1");
  const double v = -log_pi_hat / static_cast<double>(n);
  if (mode == InvertMode::Deterministic) return v;
  require(gen.is_power(), "invert: simplex inversion needs a power generator");
  return min_over_m_inverse(std::get<PowerGamma>(gen.variant()), v, A);
}

double BsProblem::invert(double log_pi_hat, long n) const {
  if (mode_ == Mode::Deterministic || !gen_.is_power())
    return bsopt::invert(InvertMode::Deterministic, gen_tilde_, 1.0, log_pi_hat, n);
  return bsopt::invert(InvertMode::SimplexPower, gen_tilde_, omega_.scale() / mass_, log_pi_hat, n);
}

// ---------------------------------------------------------------- m and descent

double solve_m(const Generator& gen, const Vec& Q, const Vec& P, double tol) {
  require(Q.size() == P.size(), "solve_m: dimension mismatch");
  double lo = kInf, hi = 0.0;
  for (size_t k = 0; k < Q.size(); ++k) {
    require(Q[k] >= 0.0, "solve_m: Q must be nonnegative");
    if (Q[k] > 0.0) {
      lo = std::min(lo, P[k] / Q[k]);
      hi = std::max(hi, P[k] / Q[k]);
    }
  }
  require(std::isfinite(lo), "solve_m: Q is identically zero");
  auto psi = [&](double m) {
    double s = 0.0;
    for (size_t k = 0; k < Q.size(); ++k)
      if (Q[k] > 0.0) s += Q[k] * gen.derivative(m * Q[k] / P[k]);
    return s;
  };
  if (hi - lo <= tol * std::max(1.0, hi)) return 0.5 * (lo + hi);
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (psi(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

std::vector<Vec> feasible_directions(const ConstraintSet& omega, int K, bool keep_sum) {
  std::vector<Vec> rows;
  for (const auto& e : omega.equalities())
    if (static_cast<int>(e.a.size()) == K) rows.push_back(e.a);
  if (keep_sum) rows.emplace_back(K, 1.0);
  Eigen::MatrixXd N = Eigen::MatrixXd::Identity(K, K);
  if (!rows.empty()) {
    Eigen::MatrixXd E(rows.size(), K);
    for (size_t i = 0; i < rows.size(); ++i)
      for (int k = 0; k < K; ++k) E(static_cast<Eigen::Index>(i), k) = rows[i][k];
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(E);
    N -= cod.pseudoInverse() * E;
  }
  std::vector<Vec> base;
  for (int k = 0; k < K; ++k) {
    Eigen::VectorXd d = N.col(k);
    if (d.norm() > 1e-9) base.emplace_back(d.data(), d.data() + K);
  }
  std::vector<Vec> dirs;
  auto push = [&](Vec d) {
    double nrm = 0.0;
    for (double x : d) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-9) return;
    for (double& x : d) x /= nrm;
    for (const Vec& e : dirs) {
      double c = 0.0;
      for (int k = 0; k < K; ++k) c += e[k] * d[k];
      if (std::fabs(std::fabs(c) - 1.0) < 1e-9) return;
    }
    dirs.push_back(std::move(d));
  };
  for (const Vec& b : base) push(b);
  for (size_t i = 0; i < base.size(); ++i)
    for (size_t j = i + 1; j < base.size(); ++j) {
      Vec d(K);
      for (int k = 0; k < K; ++k) d[k] = base[i][k] - base[j][k];
      push(std::move(d));
    }
  return dirs;
}

}  // namespace

DescentResult descend(const std::function<double(const Vec&)>& f, const ConstraintSet& omega, Vec x, bool keep_sum,
                      double tol, long max_evals, const std::function<bool(const Vec&, double)>& stop) {
  const int K = static_cast<int>(x.size());
  const auto dirs = feasible_directions(omega, K, keep_sum);
  auto eval = [&](const Vec& y) {
    const double v = f(y);
    return std::isnan(v) ? kInf : v;
  };
  DescentResult r{x, eval(x), 1, false};
  if (stop && stop(r.x, r.f)) {
    r.stopped_early = true;
    return r;
  }
  double size = 1.0;
  for (double v : x) size = std::max(size, std::fabs(v));
  double step = 0.1 * size;
  Vec y(K);
  while (step > tol * size && r.evaluations < max_evals) {
    bool improved = false;
    for (const Vec& d : dirs) {
      for (double s : {1.0, -1.0}) {
        for (int k = 0; k < K; ++k) y[k] = r.x[k] + s * step * d[k];
        if (!omega.contains(y)) continue;
        const double fy = eval(y);
        ++r.evaluations;
        if (fy < r.f) {
          r.x = y;
          r.f = fy;
          improved = true;
          if (stop && stop(r.x, r.f)) {
            r.stopped_early = true;
            return r;
          }
          break;
        }
      }
    }
    step *= improved ? 2.0 : 0.5;
  }
  return r;
}

// ---------------------------------------------------------------- simulation

namespace {

struct BatchResult {
  double lse = -kInf;  // log of the sum of weights over hits
  long hits = 0;
  long count = 0;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Estimate simulate(const BsProblem& prob, const BlockPartition& bp, const std::vector<BlockSampler>& samplers,
                  const EstimatorConfig& cfg) {
  require(cfg.L >= 1, "estimator: L must be >= 1");
  require(cfg.batches >= 2, "estimator: need at least two batches");
  const long L = cfg.L;
  const int B = static_cast<int>(std::min<long>(cfg.batches, L));
  const int K = bp.K();
  const long n = bp.n;
  std::vector<BatchResult> res(B);

  auto run_batch = [&](int b) {
    const long first = L * b / B, last = L * (b + 1) / B;
    BatchResult r;
    r.count = last - first;
    Vec S(K);
    for (long l = first; l < last; ++l) {
      Rng rng(cfg.seed, static_cast<std::uint64_t>(l));
      double lw = 0.0;
      for (int k = 0; k < K; ++k) {
        S[k] = samplers[k](rng);
        lw += samplers[k].log_isf(S[k]);
      }
      if (prob.member_sums(S, n)) {
        r.lse = log_add(r.lse, lw);
        ++r.hits;
      }
    }
    res[b] = r;
  };

  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, B);
  if (threads <= 1) {
    for (int b = 0; b < B; ++b) run_batch(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int b = next++; b < B; b = next++) run_batch(b);
      });
    for (auto& th : pool) th.join();
  }

  Estimate est;
  est.n = n;
  est.L = L;
  est.seed = cfg.seed;
  double lse = -kInf;
  long seen = 0;
  for (int b = 0; b < B; ++b) {
    lse = log_add(lse, res[b].lse);
    seen += res[b].count;
    est.hits += res[b].hits;
    if (cfg.trace) est.trace.push_back(lse - std::log(static_cast<double>(seen)));
  }
  est.log_pi_hat = lse - std::log(static_cast<double>(L));
  if (est.hits == 0) {
    std::ostringstream os;
    os << "zero hits in " << L << " replicates; rule-of-three upper bound on the probability: " << 3.0 / L;
    est.warnings.push_back(os.str());
    est.value = kInf;
    return est;
  }
  // batch means on the scale of Pi_hat, relative to the overall estimate
  double s1 = 0.0, s2 = 0.0;
  for (int b = 0; b < B; ++b) {
    const double r = std::exp(res[b].lse - std::log(static_cast<double>(res[b].count)) - est.log_pi_hat);
    s1 += r;
    s2 += r * r;
  }
  const double mean = s1 / B;
  const double var = std::max(0.0, (s2 - B * mean * mean) / (B - 1));
  est.stderr_log = std::sqrt(var / B);
  if (B < 10) est.warnings.push_back("fewer than 10 batches; standard error is unreliable");
  try {
    est.value = prob.invert(est.log_pi_hat, n);
    const double h = 1e-6 * std::max(1.0, std::fabs(est.log_pi_hat));
    const double dv = (prob.invert(est.log_pi_hat + h, n) - prob.invert(est.log_pi_hat - h, n)) / (2.0 * h);
    est.stderr = std::fabs(dv) * est.stderr_log;
  } catch (const std::exception& e) {
    est.value = kNaN;
    est.stderr = kNaN;
    est.warnings.push_back(std::string("inversion failed: ") + e.what());
  }
  if (prob.mode() == Mode::Simplex && !prob.exact_inversion())
    est.warnings.push_back("non-power generator: value is the lower bound inf_m D(m Omega, P)");
  return est;
}

long minimal_run(const Vec& p) {
  for (long M = 1;; ++M) {
    try {
      (void)partition(p, M);
      return M;
    } catch (const DomainError&) {
    }
    if (M > 100000000) throw DomainError("proxy: reference vector too unbalanced");
  }
}

}  // namespace

Estimate naive_estimate(const BsProblem& prob, const EstimatorConfig& cfg) {
  const BlockPartition bp = prob.blocks(cfg.n);
  std::vector<BlockSampler> samplers;
  for (int k = 0; k < bp.K(); ++k) samplers.push_back(prob.law().block_sampler(0.0, bp.sizes[k]));
  Estimate est = simulate(prob, bp, samplers, cfg);
  est.tau.assign(bp.K(), 0.0);
  if (bp.bias_flag) est.warnings.push_back("n p_k not all integers; blocks are floored (small estimator bias)");
  return est;
}

Estimate is_estimate(const BsProblem& prob, const Vec& q_star, const EstimatorConfig& cfg) {
  const BlockPartition bp = prob.blocks(cfg.n);
  const Vec tau = prob.tilts(q_star);
  std::vector<BlockSampler> samplers;
  for (int k = 0; k < bp.K(); ++k) samplers.push_back(prob.law().block_sampler(tau[k], bp.sizes[k]));
  Estimate est = simulate(prob, bp, samplers, cfg);
  est.q_star = q_star;
  est.tau = tau;
  if (bp.bias_flag) est.warnings.push_back("n p_k not all integers; blocks are floored (small estimator bias)");
  return est;
}

namespace {

std::optional<Vec> hit_run(const BsProblem& prob, const EstimatorConfig& cfg) {
  const long Mmin = minimal_run(prob.p_tilde());
  const long M0 = cfg.proxy_M > 0 ? cfg.proxy_M : std::max(Mmin, std::min<long>(cfg.n, 4 * Mmin));
  const std::uint64_t key = mix(cfg.seed);
  long M = 0;
  std::vector<BlockSampler> samplers;
  for (long r = 0; r < cfg.proxy_budget; ++r) {
    // after half the budget without a hit, fall back to the shortest runs
    const long Mr = (cfg.proxy_M > 0 || r < cfg.proxy_budget / 2) ? M0 : Mmin;
    if (Mr != M) {
      M = Mr;
      const BlockPartition bp = partition(prob.p_tilde(), M);
      samplers.clear();
      for (int k = 0; k < bp.K(); ++k) samplers.push_back(prob.law().block_sampler(0.0, bp.sizes[k]));
    }
    Rng rng(key, static_cast<std::uint64_t>(r));
    Vec S(samplers.size());
    for (size_t k = 0; k < S.size(); ++k) S[k] = samplers[k](rng);
    if (prob.member_sums(S, M)) return prob.to_original(S, M);
  }
  return std::nullopt;
}

std::optional<Vec> density_run(const BsProblem& prob, const EstimatorConfig& cfg) {
  const int K = prob.K();
  const Vec& p = prob.p_tilde();
  const Generator& g = prob.scaled_generator();
  const double h = 1e-5;
  const double curv = (g.derivative(1.0 + h) - g.derivative(1.0 - h)) / (2.0 * h);
  require(curv > 0.0, "proxy: generator has no positive curvature at 1");
  Vec sd(K);
  for (int k = 0; k < K; ++k) sd[k] = std::sqrt(p[k] / curv);
  Rng rng(mix(cfg.seed ^ 0x5bd1e995ull), 0);
  std::normal_distribution<double> N(0.0, 1.0);
  auto to_q = [&](const Vec& T) -> std::optional<Vec> {
    Vec S = T;  // block sums of a run of length 1 in tilde scale
    return prob.to_original(S, 1);
  };
  auto logq = [&](const Vec& T) {
    double s = 0.0;
    for (int k = 0; k < K; ++k) s -= 0.5 * std::pow((T[k] - p[k]) / sd[k], 2);
    return s;
  };
  auto logpi = [&](const Vec& T) {
    const double D = divergence(g, T, p);
    return std::isfinite(D) ? -D : -kInf;
  };
  const bool gaussian = g.is_power() && std::get<PowerGamma>(g.variant()).gamma == 2.0;
  Vec x = p, y(K);
  double lx = logpi(x) - logq(x);
  const long burn = gaussian ? 0 : 1000;
  const long thin = gaussian ? 1 : 10;
  const long total = burn + thin * cfg.proxy_budget;
  for (long i = 0; i < total; ++i) {
    for (int k = 0; k < K; ++k) y[k] = p[k] + sd[k] * N(rng);
    if (gaussian) {
      x = y;
    } else {
      const double ly = logpi(y) - logq(y);
      if (std::log(rng.uniform()) < ly - lx) {
        x = y;
        lx = ly;
      }
    }
    if (i < burn || (i - burn) % thin != thin - 1) continue;
    const auto Q = to_q(x);
    if (Q && prob.omega().contains(*Q)) return Q;
  }
  return std::nullopt;
}

Vec refine(const BsProblem& prob, Vec Q) {
  auto res = descend([&](const Vec& q) { return prob.objective(q); }, prob.omega(), std::move(Q),
                     prob.mode() == Mode::Simplex, 1e-10, 50000);
  return res.x;
}

Vec raw_proxy(const BsProblem& prob, const EstimatorConfig& cfg) {
  std::optional<Vec> Q;
  switch (cfg.proxy) {
    case ProxyMethod::Given:
      require(static_cast<int>(cfg.q_star.size()) == prob.K(), "proxy: given Q* has the wrong dimension");
      return cfg.q_star;
    case ProxyMethod::HitRun:
      Q = hit_run(prob, cfg);
      break;
    case ProxyMethod::DivergenceDensity:
      Q = density_run(prob, cfg);
      break;
  }
  if (!Q)
    throw NumericError(
        "proxy search: the constraint set was not hit within the budget; raise the budget or give Q* explicitly");
  return *Q;
}

}  // namespace

Vec proxy_q_star(const BsProblem& prob, const EstimatorConfig& cfg) {
  Vec Q = raw_proxy(prob, cfg);
  if (cfg.proxy == ProxyMethod::Given || !cfg.refine_proxy) return Q;
  return refine(prob, std::move(Q));
}

Estimate estimate(const BsProblem& prob, const EstimatorConfig& cfg) {
  return is_estimate(prob, proxy_q_star(prob, cfg), cfg);
}

Vec refine_proxy(const BsProblem& prob, Vec q) {
  require(prob.omega().contains(q), "refine_proxy: the start point is not in the constraint set");
  return refine(prob, std::move(q));
}

bool has_free_equalities(const ConstraintSet& omega) {
  if (omega.tolerance_sensitive()) return true;
  for (const auto& e : omega.equalities()) {
    if (e.a.empty()) continue;
    for (double v : e.a)
      if (v != e.a[0]) return true;
  }
  return false;
}

Vec project_equalities(const ConstraintSet& omega, const Vec& q) {
  const auto& eqs = omega.equalities();
  const int K = static_cast<int>(q.size());
  if (eqs.empty()) return q;
  Eigen::MatrixXd E(eqs.size(), K);
  Eigen::VectorXd r(eqs.size());
  for (size_t i = 0; i < eqs.size(); ++i) {
    require(static_cast<int>(eqs[i].a.size()) == K, "project_equalities: dimension mismatch");
    double s = 0.0;
    for (int k = 0; k < K; ++k) {
      E(static_cast<Eigen::Index>(i), k) = eqs[i].a[k];
      s += eqs[i].a[k] * q[k];
    }
    r(static_cast<Eigen::Index>(i)) = s - eqs[i].b;
  }
  const Eigen::VectorXd d = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(E).pseudoInverse() * r;
  Vec out(q);
  for (int k = 0; k < K; ++k) out[k] -= d(k);
  return out;
}

SlabEstimate estimate_slab_limit(const BsProblem& prob, const EstimatorConfig& cfg, double width) {
  require(width >= 0.0, "slab width must be >= 0");
  SlabEstimate out;
  out.width = width;
  const BsProblem wide = prob.with_omega(prob.omega().relaxed(width));
  const bool by_width = cfg.proxy == ProxyMethod::Given && cfg.q_star_for_width;
  const Vec qw = by_width ? cfg.q_star_for_width(width) : proxy_q_star(wide, cfg);
  const Estimate ew = is_estimate(wide, qw, cfg);
  out.wide_value = ew.value;
  if (width <= 1e-9 || !has_free_equalities(prob.omega()) || !std::isfinite(ew.value)) {
    out.estimate = ew;
    return out;
  }
  const BsProblem narrow = prob.with_omega(prob.omega().relaxed(0.5 * width));
  Vec q0 = project_equalities(prob.omega(), qw);
  Vec qn;
  if (by_width)
    qn = cfg.q_star_for_width(0.5 * width);
  else if (narrow.omega().contains(q0))
    qn = cfg.refine_proxy ? refine(narrow, std::move(q0)) : q0;
  else
    qn = proxy_q_star(narrow, cfg);
  Estimate en = is_estimate(narrow, qn, cfg);
  out.narrow_value = en.value;
  if (!std::isfinite(en.value)) {
    out.estimate = ew;
    out.estimate.warnings.push_back("the half-width run failed; value is for the slab of width " + std::to_string(width));
    return out;
  }
  out.extrapolated = true;
  en.value = 2.0 * en.value - ew.value;
  en.stderr = std::sqrt(4.0 * en.stderr * en.stderr + ew.stderr * ew.stderr);
  std::ostringstream os;
  os << "equalities widened to slabs of width " << width << " and " << 0.5 * width << " (values " << ew.value << ", "
     << out.narrow_value << "); value extrapolated to width 0";
  en.warnings.insert(en.warnings.begin(), os.str());
  out.estimate = std::move(en);
  return out;
}

Bounds bounds_general(const BsProblem& prob, const EstimatorConfig& cfg) {
  Bounds out;
  const Vec Q0 = raw_proxy(prob, cfg);
  const Vec Qs = (cfg.proxy == ProxyMethod::Given || !cfg.refine_proxy) ? Q0 : refine(prob, Q0);
  out.estimate = is_estimate(prob, Qs, cfg);
  const Estimate& est = out.estimate;
  out.warnings = est.warnings;
  if (!std::isfinite(est.value)) {
    out.warnings.push_back("bounds: the estimate is not finite");
    out.q_hat = Qs;
    return out;
  }
  const bool keep_sum = prob.mode() == Mode::Simplex;
  if (prob.exact_inversion()) {
    auto res = descend([&](const Vec& q) { return prob.divergence_of(q); }, prob.omega(), Q0, keep_sum, 1e-12);
    out.q_hat = res.x;
    out.lower = out.upper = est.value;
    return out;
  }
  // descend on D(Q, P) until inf_m D(m Q, P) is within eta of the estimate
  const double Dhat = -est.log_pi_hat / static_cast<double>(est.n);
  const double eta = cfg.eta_rel * std::fabs(Dhat);
  auto stop = [&](const Vec& q, double) { return prob.objective(q) < Dhat + eta; };
  const long budget = 200000;
  auto res = descend([&](const Vec& q) { return prob.divergence_of(q); }, prob.omega(), Q0, keep_sum, 1e-12, budget,
                     stop);
  if (!res.stopped_early && res.evaluations >= budget)
    out.warnings.push_back("bounds: descent budget exhausted; upper bound is the best point found");
  out.q_hat = res.x;
  out.lower = Dhat;
  out.upper = res.f;
  return out;
}

}  // namespace bsopt
