#include "bsopt/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "bsopt/engine.hpp"
#include "bsopt/legendre.hpp"
#include "bsopt/oracle.hpp"
#include "bsopt/problems.hpp"

namespace bsopt {

double kolmogorov_q(double x) {
  if (x < 0.18) return 1.0;  // the series is 1 to double precision here
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double t = std::exp(-2.0 * j * j * x * x);
    s += (j % 2 ? 1.0 : -1.0) * t;
    if (t < 1e-18) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_two_sample(Vec a, Vec b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // step over all copies of the smaller value so that ties count once; lattice
    // values reached by different sums can differ in the last bits
    const double x = std::min(a[i], b[j]);
    const double top = x + 1e-9 * std::max(1.0, std::fabs(x));
    while (i < a.size() && a[i] <= top) ++i;
    while (j < b.size() && b[j] <= top) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

std::vector<Generator> reference_generators() {
  const std::vector<Generator::Variant> v = {
      PowerGamma{-1.0, 1.0},   PowerGamma{-0.5, 2.0},         PowerGamma{0.5, 1.0},
      PowerGamma{3.0, 1.0},    PowerGamma{2.0, 1.0},          PowerGamma{0.0, 1.5},
      PowerGamma{1.0, 2.0},    AnchoredKL{0.3, 1.5},          GeneralizedKL{1.0, 1.0},
      GeneralizedKL{-0.5, 2.0}, BlendedWeightChiSq{0.5, 1.0}, TwoPoint{0.0, 2.0, 3.0},
      GenAsymLaplace{1.0, 2.0, 1.5, 1.0}};
  return {v.begin(), v.end()};
}

std::string format_result(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "[%s] %2d %-22s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
  std::ostringstream os;
  os << buf << " " << r.detail;
  std::snprintf(buf, sizeof buf, " (%.1fs)", r.seconds);
  os << buf;
  return os.str();
}

namespace {

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// interior points of ]lo, hi[, with infinite ends replaced by finite ones
Vec interior(double lo, double hi, double lo_inf, double hi_inf, int count) {
  const double a = std::isfinite(lo) ? lo : lo_inf, b = std::isfinite(hi) ? hi : hi_inf;
  Vec x(count);
  for (int i = 0; i < count; ++i) x[i] = a + (b - a) * (i + 1.0) / (count + 1.0);
  return x;
}

double rel_err(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

Vec random_prob(Rng& rng, int K, double floor = 0.05) {
  Vec p(K);
  double s = 0.0;
  for (auto& v : p) s += (v = floor + rng.uniform());
  for (auto& v : p) v /= s;
  return p;
}

const Vec kRefP{0.2, 0.3, 0.5};
ConstraintSet reference_omega() { return ConstraintSet::simplex(3) & ConstraintSet::halfspace({1, 0, 0}, 0.5); }

// ---------------------------------------------------------------- 1

CriterionResult duality(const ValidationOptions&) {
  CriterionResult r{1, "duality", true, "", 0};
  double worst_lam = 0, worst_phi = 0, worst_lt = 0;
  std::string bad;
  for (const Generator& g : reference_generators()) {
    const WeightLaw law = law_for(g);
    const GeneratorSpec spec = spec_from_generator(g);
    const CumulantFunction lam = build_lambda(spec);
    const Generator phi = build_phi(spec);
    auto lt = legendre_transform([&](double z) { return lam(z); }, lam.lambda_minus(), lam.lambda_plus());
    double el = 0, ep = 0, et = 0;
    for (double z : interior(law.lambda_minus(), law.lambda_plus(), -3, 3, 50))
      el = std::max(el, rel_err(lam(z), law.log_mgf(z)));
    for (double t : interior(g.lower(), g.upper(), -2, 4, 50)) {
      ep = std::max(ep, rel_err(phi(t), g(t)));
      et = std::max(et, rel_err(lt(t), g(t)));
    }
    worst_lam = std::max(worst_lam, el);
    worst_phi = std::max(worst_phi, ep);
    worst_lt = std::max(worst_lt, et);
    if (!(el <= 1e-8 && ep <= 1e-8 && et <= 1e-7)) {
      r.pass = false;
      bad += " " + g.name();
    }
  }
  r.detail = std::to_string(reference_generators().size()) + " generators; max err Lambda " + fmt("%.1e", worst_lam) +
             ", phi " + fmt("%.1e", worst_phi) + ", Legendre " + fmt("%.1e", worst_lt);
  if (!bad.empty()) r.detail += "; failing:" + bad;
  return r;
}

// ---------------------------------------------------------------- 2

CriterionResult law_suite(const ValidationOptions& opt) {
  CriterionResult r{2, "weight laws", true, "", 0};
  const long N = 1000000, Nks = 100000;
  double min_p = 1.0;
  std::string bad;
  std::uint64_t key = opt.seed;
  for (const Generator& g : reference_generators()) {
    const WeightLaw law = law_for(g);
    // 2z stays inside the MGF domain so that the empirical MGF has a variance
    const double lo = law.lambda_minus(), hi = law.lambda_plus();
    const double zp = std::isfinite(hi) ? std::min(0.5, 0.25 * hi) : 0.5;
    const double zn = std::isfinite(lo) ? std::max(-0.5, 0.25 * lo) : -0.5;
    const MeanOneReport rep = check_mean_one(law, N, {zn, 0.5 * zp, zp}, ++key, 3.0);
    std::string why;
    if (!(std::fabs(rep.mean - 1.0) <= 4.0 * rep.mean_se)) why += " mean " + fmt("%.5f", rep.mean);
    for (const auto& p : rep.points)
      if (!p.ok) why += " mgf(" + fmt("%g", p.z) + ")";
    const BlockSampler one = law.block_sampler(0.0, 1);
    for (long nk : {2L, 5L, 20L}) {
      const BlockSampler block = law.block_sampler(0.0, nk);
      Rng ra(++key, 0), rb(key, 1);
      Vec a(Nks), b(Nks);
      for (long i = 0; i < Nks; ++i) {
        a[i] = block(ra);
        double s = 0.0;
        for (long j = 0; j < nk; ++j) s += one(rb);
        b[i] = s;
      }
      const KsResult ks = ks_two_sample(std::move(a), std::move(b));
      min_p = std::min(min_p, ks.p_value);
      if (!(ks.p_value > 1e-3)) why += " ks(n=" + std::to_string(nk) + ")";
    }
    if (!why.empty()) {
      r.pass = false;
      bad += " " + law.name() + ":" + why + ";";
    }
  }
  r.detail = std::to_string(reference_generators().size()) + " laws; smallest KS p-value " + fmt("%.3g", min_p);
  if (!bad.empty()) r.detail += "; failing:" + bad;
  return r;
}

// ---------------------------------------------------------------- 3

CriterionResult min_over_m_suite(const ValidationOptions& opt) {
  CriterionResult r{3, "inf over m", true, "", 0};
  Rng rng(opt.seed, 3);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    // gamma uniform on [-2, 1] u [2, 4]
    const double u = 5.0 * rng.uniform();
    const double g = u < 3.0 ? u - 2.0 : u - 1.0;
    const double c = 0.5 + 1.5 * rng.uniform();
    const int K = 2 + static_cast<int>(4 * rng.uniform());
    const Vec P = random_prob(rng, K);
    const double A = 0.3 + 2.7 * rng.uniform();
    Vec Q = random_prob(rng, K);
    for (auto& q : Q) q *= A;
    const PowerGamma pg{g, c};
    const MinOverM closed = min_over_m_closed(pg, Q, P);
    auto f = [&](double m) {
      Vec mq(Q);
      for (auto& v : mq) v *= m;
      return divergence(Generator(pg), mq, P);
    };
    // coarse log scan for a bracket, then golden section
    int best = 0;
    double fb = kInf;
    const int steps = 400;
    auto mgrid = [&](int j) { return std::pow(10.0, -4.0 + 8.0 * j / steps); };
    for (int j = 0; j <= steps; ++j) {
      const double v = f(mgrid(j));
      if (v < fb) fb = v, best = j;
    }
    const GoldenMin gm = golden_min(f, mgrid(std::max(best - 1, 0)), mgrid(std::min(best + 1, steps)), 1e-12);
    const double e = std::fabs(gm.fx - closed.value) / std::max(1.0, std::fabs(closed.value));
    worst = std::max(worst, e);
  }
  r.pass = worst <= 1e-10;
  r.detail = "100 random instances, max |closed - golden| " + fmt("%.1e", worst);

  // argmin coincidence on the grid A * {i/100}
  int cases = 0, agree = 0;
  for (double g : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0}) {
    for (double A : {0.5, 1.0, 2.0}) {
      const PowerGamma pg{g, 1.0};
      const Generator gen(pg);
      double bd = kInf, bv = kInf;
      int id = -1, iv = -1, idx = 0;
      double v_at_id = kInf, d_at_iv = kInf;
      for (int a = 50; a <= 100; ++a) {
        for (int b = 0; a + b <= 100; ++b, ++idx) {
          const Vec Q{A * a / 100.0, A * b / 100.0, A * (100 - a - b) / 100.0};
          const double D = divergence(gen, Q, kRefP);
          if (!std::isfinite(D)) continue;
          const double v = min_over_m_forward(pg, D, A);
          if (D < bd) bd = D, id = idx, v_at_id = v;
          if (v < bv) bv = v, iv = idx, d_at_iv = D;
        }
      }
      ++cases;
      // equal indices, or a tie in both criteria
      if (id == iv || (v_at_id == bv && d_at_iv == bd)) ++agree;
    }
  }
  r.pass = r.pass && agree == cases;
  r.detail += "; argmin agrees on " + std::to_string(agree) + "/" + std::to_string(cases) + " grids";
  return r;
}

// ---------------------------------------------------------------- 4

CriterionResult unbiasedness(const ValidationOptions& opt) {
  CriterionResult r{4, "exact unbiasedness", true, "", 0};
  const Vec P{0.5, 0.5};
  std::ostringstream os;
  for (auto gv : {Generator::Variant(PowerGamma{1.0, 1.0}), Generator::Variant(TwoPoint{0.0, 2.0, 1.0})}) {
    const Generator gen(gv);
    // q1 >= 1.25 cannot be reached by the two-point law at n = 4
    const double t = gen.is_power() ? 1.25 : 0.75;
    const BsProblem prob(gen, P, ConstraintSet::halfspace({1, 0}, t), Mode::Deterministic);
    const long n = 4;
    const double exact = exact_pi(prob.law(), prob.blocks(n), [&](const Vec& S) { return prob.member_sums(S, n); });
    EstimatorConfig cfg;
    cfg.n = n;
    cfg.L = 100000;
    cfg.seed = opt.seed + 4;
    cfg.threads = opt.threads;
    const Estimate nv = naive_estimate(prob, cfg);
    const Estimate is = estimate(prob, cfg);
    const double pn = std::exp(nv.log_pi_hat), pi = std::exp(is.log_pi_hat);
    const double sn = nv.stderr_log * pn, si = is.stderr_log * pi;
    const bool ok = std::fabs(pn - exact) <= 3 * sn && std::fabs(pi - exact) <= 3 * si && is.hit_rate() > nv.hit_rate();
    r.pass = r.pass && ok;
    os << gen.name() << ": exact " << fmt("%.6f", exact) << " naive " << fmt("%.6f", pn) << " IS " << fmt("%.6f", pi)
       << " hit " << fmt("%.3f", nv.hit_rate()) << "/" << fmt("%.3f", is.hit_rate()) << "; ";
  }
  r.detail = os.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

// ---------------------------------------------------------------- 5, 6

EstimatorConfig reference_config(const ValidationOptions& opt, long n, long L) {
  EstimatorConfig cfg;
  cfg.n = n;
  cfg.L = L;
  cfg.seed = opt.seed + 5;
  cfg.threads = opt.threads;
  return cfg;
}

CriterionResult consistency(const ValidationOptions& opt) {
  CriterionResult r{5, "consistency", true, "", 0};
  const ConstraintSet omega = reference_omega();
  std::ostringstream os;
  for (double g : {0.0, 1.0, 2.0}) {
    const Generator gen(PowerGamma{g, 1.0});
    const BsProblem prob(gen, kRefP, omega, Mode::Simplex);
    const double oracle = grid_min_divergence(gen, kRefP, omega, 0.01).value;
    std::vector<Estimate> trace;
    for (long n : {200L, 500L, 2000L}) trace.push_back(estimate(prob, reference_config(opt, n, 100000)));
    const Estimate& last = trace.back();
    bool ok = std::fabs(last.value - oracle) <= 0.02 + 0.05 * oracle;
    for (size_t i = 0; i + 1 < trace.size(); ++i)
      ok = ok && trace[i].value >= trace[i + 1].value - 3 * std::hypot(trace[i].stderr, trace[i + 1].stderr);
    r.pass = r.pass && ok;
    os << "g=" << g << ": " << fmt("%.4f", trace[0].value) << " > " << fmt("%.4f", trace[1].value) << " > "
       << fmt("%.4f", last.value) << " vs " << fmt("%.4f", oracle) << "; ";
  }
  r.detail = os.str();
  r.detail.resize(r.detail.size() - 2);
  return r;
}

CriterionResult hit_floor(const ValidationOptions& opt) {
  CriterionResult r{6, "hit-rate floor", true, "", 0};
  double lowest = 1.0;
  for (double g : {0.0, 1.0, 2.0}) {
    const BsProblem prob(Generator(PowerGamma{g, 1.0}), kRefP, reference_omega(), Mode::Simplex);
    for (long n : {200L, 500L, 1000L}) lowest = std::min(lowest, estimate(prob, reference_config(opt, n, 20000)).hit_rate());
  }
  r.pass = lowest >= 0.1;
  r.detail = "lowest IS hit rate " + fmt("%.3f", lowest) + " over gamma in {0,1,2}, n in {200,500,1000}";
  return r;
}

// ---------------------------------------------------------------- 7

CriterionResult round_trips(const ValidationOptions&) {
  CriterionResult r{7, "inversion round trip", true, "", 0};
  double worst = 0.0;
  for (double g : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0})
    for (double A : {0.5, 1.0, 2.0})
      for (double D : {0.0, 0.01, 0.1, 0.3}) {
        const PowerGamma pg{g, 1.0};
        // D is a divergence of some Q with mass A only above the m-floor
        const double D0 = D + divergence(Generator(pg), {A}, {1.0});
        const double back = min_over_m_inverse(pg, min_over_m_forward(pg, D0, A), A);
        worst = std::max(worst, std::fabs(back - D0) / std::max(1.0, D0));
      }
  r.pass = worst <= 1e-12;
  r.detail = "72 triples, max error " + fmt("%.1e", worst);
  return r;
}

// ---------------------------------------------------------------- 8

CriterionResult reductions(const ValidationOptions& opt) {
  CriterionResult r{8, "reductions", true, "", 0};
  Rng rng(opt.seed, 8);
  auto unif = [&](double a, double b) { return a + (b - a) * rng.uniform(); };
  double eq = 0, et = 0, el = 0;
  for (int i = 0; i < 100; ++i) {
    QuadraticInstance qi;
    for (int k = 0; k < 4; ++k) {
      qi.c1.push_back(unif(-1, 1));
      qi.c2.push_back((rng.uniform() < 0.5 ? -1 : 1) * unif(0.2, 2));
      qi.c3.push_back(unif(0.1, 2));
    }
    const QuadraticReduction qr = reduce_quadratic(qi);
    Vec x(4);
    for (auto& v : x) v = unif(-3, 3);
    const double obj = quadratic_objective(qi, x);
    eq = std::max(eq, rel_err(qr.c4 + divergence(Generator(qr.gen), qr.to_q(x), qr.P), obj));

    TransportInstance ti{random_prob(rng, 3), random_prob(rng, 2)};
    const TransportReduction tr = reduce_transport(ti);
    Vec pi = random_prob(rng, 6, 0.0);
    const double to = transport_objective(ti, pi);
    double sq = 0.0;
    for (double v : pi) sq += v * v;
    et = std::max({et, rel_err(divergence(Generator(tr.gen), pi, tr.P), to), rel_err(6 * sq + tr.quad_offset, to)});

    LinearInstance li;
    const double gs[] = {-1.0, 0.5, 2.0, 3.0};
    li.gamma = gs[i % 4];
    for (int k = 0; k < 5; ++k) li.cost.push_back(unif(0.1, 3));
    const LinearReduction lr = reduce_linear(li);
    Vec xl(5);
    for (auto& v : xl) v = unif(0.01, 2);
    el = std::max(el, rel_err(lr.c1 * hellinger_integral(li.gamma, lr.to_q(xl), lr.P), linear_objective(li, xl)));
  }
  bool ok = eq <= 1e-12 && et <= 1e-12 && el <= 1e-12;

  SolveOptions so;
  so.estimator = reference_config(opt, 1000, 20000);
  const Report tr = solve(TransportInstance{{0.5, 0.5}, {0.5, 0.5}}, so);
  ok = ok && std::fabs(tr.value) <= 0.02;

  so.estimator = reference_config(opt, 2000, 50000);
  const Report em = solve(EntropyMaxInstance{entropy_preset("shannon"), 3, ConstraintSet::halfspace({1, 0, 0}, 0.5)}, so);
  ok = ok && std::fabs(em.value - 1.039721) <= 0.03;
  r.pass = ok;
  r.detail = "identity errors " + fmt("%.1e", eq) + "/" + fmt("%.1e", et) + "/" + fmt("%.1e", el) + "; transport " +
             fmt("%.5f", tr.value) + "; entropy max " + fmt("%.5f", em.value) + " (1.039721)";
  return r;
}

// ---------------------------------------------------------------- 9

CriterionResult bounds_suite(const ValidationOptions& opt) {
  CriterionResult r{9, "bounds", true, "", 0};
  Rng rng(opt.seed, 9);
  const Generator js(GeneralizedKL{1.0, 1.0});
  int ok = 0;
  double gap = 0.0;
  std::string miss;
  for (int i = 0; i < 20; ++i) {
    const Vec P = random_prob(rng, 3, 0.2);
    const double t = P[0] + 0.15 + 0.25 * rng.uniform();
    const ConstraintSet omega = ConstraintSet::simplex(3) & ConstraintSet::halfspace({1, 0, 0}, t);
    const BsProblem prob(js, P, omega, Mode::Simplex);
    EstimatorConfig cfg = reference_config(opt, 100000, 20000);
    cfg.seed += i;
    const Bounds b = bounds_general(prob, cfg);
    const double oracle = grid_min_divergence(js, P, omega, 0.01, 7).value;
    // the refined grid oracle is accurate to about 1e-8
    if (b.lower <= oracle && oracle <= b.upper + 1e-7)
      ++ok;
    else
      miss += " #" + std::to_string(i) + " " + fmt("%.6f", b.lower) + "/" + fmt("%.6f", oracle) + "/" +
              fmt("%.6f", b.upper) + " (se " + fmt("%.1e", b.estimate.stderr) + ")";
    gap = std::max(gap, b.upper - b.lower);
  }
  int power_ok = 0;
  for (double g : {0.0, 1.0, 2.0}) {
    const Generator gen(PowerGamma{g, 1.0});
    const BsProblem prob(gen, kRefP, reference_omega(), Mode::Simplex);
    const Bounds b = bounds_general(prob, reference_config(opt, 2000, 100000));
    const double oracle = grid_min_divergence(gen, kRefP, reference_omega(), 0.01).value;
    const double inv = prob.invert(b.estimate.log_pi_hat, b.estimate.n);
    if (b.lower == b.upper && std::fabs(b.lower - inv) <= 1e-12 && std::fabs(b.lower - oracle) <= 0.02 + 0.05 * oracle)
      ++power_ok;
  }
  r.pass = ok == 20 && power_ok == 3;
  r.detail = "Jensen-Shannon " + std::to_string(ok) + "/20 bracket the oracle (widest gap " + fmt("%.4f", gap) +
             "); power " + std::to_string(power_ok) + "/3 exact";
  if (!miss.empty()) r.detail += "; lower/oracle/upper:" + miss;
  return r;
}

// ---------------------------------------------------------------- 10

Vec fingerprint(const ValidationOptions& opt, int threads) {
  ValidationOptions o = opt;
  o.threads = threads;
  Vec out;
  const BsProblem prob(Generator(PowerGamma{1.0, 1.0}), kRefP, reference_omega(), Mode::Simplex);
  EstimatorConfig cfg = reference_config(o, 500, 20000);
  cfg.trace = true;
  const Estimate e = estimate(prob, cfg);
  out.insert(out.end(), {e.log_pi_hat, e.value, e.stderr, static_cast<double>(e.hits)});
  out.insert(out.end(), e.trace.begin(), e.trace.end());
  out.insert(out.end(), e.q_star.begin(), e.q_star.end());
  const BsProblem js(Generator(GeneralizedKL{1.0, 1.0}), kRefP, reference_omega(), Mode::Simplex);
  const Bounds b = bounds_general(js, reference_config(o, 2000, 10000));
  out.insert(out.end(), {b.lower, b.upper});
  EstimatorConfig dc = reference_config(o, 4, 20000);
  dc.proxy = ProxyMethod::DivergenceDensity;
  const BsProblem det(Generator(PowerGamma{1.0, 1.0}), {0.5, 0.5}, ConstraintSet::halfspace({1, 0}, 1.25),
                      Mode::Deterministic);
  const Estimate d = estimate(det, dc);
  out.insert(out.end(), {d.log_pi_hat, d.stderr});
  const MeanOneReport m = check_mean_one(law_for(Generator(PowerGamma{3.0, 1.0})), 10000, {0.1}, o.seed);
  out.insert(out.end(), {m.mean, m.points[0].empirical_mgf});
  return out;
}

CriterionResult determinism(const ValidationOptions& opt) {
  CriterionResult r{10, "determinism", true, "", 0};
  const int t = std::max(4, opt.threads);
  const Vec a = fingerprint(opt, 1), b = fingerprint(opt, 1), c = fingerprint(opt, t);
  auto same = [](const Vec& x, const Vec& y) {
    return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
  };
  r.pass = same(a, b) && same(a, c);
  r.detail = std::to_string(a.size()) + " numbers; rerun " + (same(a, b) ? "identical" : "DIFFERS") + ", " +
             std::to_string(t) + " threads " + (same(a, c) ? "identical" : "DIFFER");
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const ValidationOptions& opt) {
  using Fn = CriterionResult (*)(const ValidationOptions&);
  const Fn suites[] = {duality,     law_suite, min_over_m_suite, unbiasedness, consistency,
                       hit_floor,   round_trips, reductions,     bounds_suite, determinism};
  const char* names[] = {"duality", "weight laws", "inf over m", "exact unbiasedness", "consistency",
                         "hit-rate floor", "inversion round trip", "reductions", "bounds", "determinism"};
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 10; ++id) {
    if (!opt.only.empty() && !opt.only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = suites[id - 1](opt);
    } catch (const std::exception& e) {
      res = {id, names[id - 1], false, std::string("error: ") + e.what(), 0};
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.on_result) opt.on_result(res);
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace bsopt
