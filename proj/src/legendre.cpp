#include "bsopt/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace bsopt {

struct CumulantFunction::Impl {
  GeneratorSpec spec;
  std::vector<double> t, Ft;  // bracketing grid and F on it
  double finv_c = 1.0;        // F^{-1}(c)
  double lo = -kInf, hi = kInf;  // ]lambda_-, lambda_+[
  double t_lo = -kInf, t_hi = kInf;
  double phi_lo = kInf, phi_hi = kInf;  // phi at finite t_lo, t_hi

  double F(double x) const { return spec.F(x); }
  double finv(double y) const;
  double lambda(double z) const;
  double phi(double t) const;
  double dphi(double t) const;
  double edge_lambda(bool upper) const;
  double edge_phi(bool upper) const;
};

namespace {

// 512-point grid over ]a, b[, geometric towards each end.
std::vector<double> bracket_grid(double a, double b) {
  std::vector<double> g;
  const int m = 256;
  for (int k = 0; k < m; ++k) {
    const double e = std::pow(10.0, -14.0 + 14.0 * k / (m - 1));
    g.push_back(std::isfinite(a) ? a + (1.0 - a) * e : 1.0 - 1e6 * std::pow(10.0, -12.0 * k / (m - 1)));
  }
  for (int k = m - 1; k >= 0; --k) {
    const double e = std::pow(10.0, -14.0 + 14.0 * k / (m - 1));
    const double x = std::isfinite(b) ? b - (b - 1.0) * e : 1.0 + 1e6 * std::pow(10.0, -12.0 * k / (m - 1));
    if (x > g.back()) g.push_back(x);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  std::vector<double> out;
  for (double x : g)
    if (x > a && x < b) out.push_back(x);
  return out;
}

double solve_increasing(const std::function<double(double)>& F, double y, double l, double r) {
  auto f = [&](double x) { return F(x) - y; };
  double fl = f(l), fr = f(r);
  if (fl == 0.0) return l;
  if (fr == 0.0) return r;
  std::uintmax_t iters = 200;
  auto tol = [](double u, double v) { return std::fabs(u - v) <= 1e-13 * std::max(1.0, std::fabs(u)); };
  const auto res = boost::math::tools::toms748_solve(f, l, r, fl, fr, tol, iters);
  return 0.5 * (res.first + res.second);
}

}  // namespace

double CumulantFunction::Impl::finv(double y) const {
  const size_t N = t.size();
  auto it = std::lower_bound(Ft.begin(), Ft.end(), y);
  if (it != Ft.end() && *it == y) return t[static_cast<size_t>(it - Ft.begin())];
  if (it != Ft.begin() && it != Ft.end()) {
    const size_t i = static_cast<size_t>(it - Ft.begin());
    return solve_increasing(spec.F, y, t[i - 1], t[i]);
  }
  // outside the grid: walk towards the endpoint until bracketed
  const bool left = (it == Ft.begin());
  double inner = left ? t.front() : t[N - 1];
  const double end = left ? spec.a : spec.b;
  for (int k = 1; k < 2000; ++k) {
    double outer;
    if (std::isfinite(end)) {
      outer = end + (inner - end) * 0.5;
      if (outer == end || outer == inner) break;
    } else {
      outer = inner + (left ? -1.0 : 1.0) * std::max(1.0, std::fabs(inner));
      if (!std::isfinite(outer)) break;
    }
    const double Fo = F(outer);
    if (left ? Fo <= y : Fo >= y) return left ? solve_increasing(spec.F, y, outer, inner)
                                              : solve_increasing(spec.F, y, inner, outer);
    inner = outer;
  }
  if (!std::isfinite(end)) return left ? -kInf : kInf;
  return end;
}

double CumulantFunction::Impl::lambda(double z) const {
  if (z == 0.0) return 0.0;
  if (z < lo || z > hi) return kInf;
  if (z == lo || z == hi) return edge_lambda(z == hi);
  const double c = spec.anchor;
  // F^{-1} overflowing at z means Lambda(z) is beyond double range
  if (!std::isfinite(finv(z + c))) return kInf;
  auto g = [&](double u) { return finv(u + c) - finv_c; };
  // tanh-sinh copes with the endpoint singularity of F^{-1} near the ends of
  // the domain, where Gauss-Kronrod would bisect to its depth limit
  thread_local boost::math::quadrature::tanh_sinh<double> ts(10);
  double I;
  try {
    I = z > 0.0 ? ts.integrate(g, 0.0, z, 1e-12) : -ts.integrate(g, z, 0.0, 1e-12);
  } catch (const std::exception&) {
    return kInf;
  }
  return std::isfinite(I) ? I + z : kInf;
}

// Lambda at a finite end of its domain, as the limit from inside.
double CumulantFunction::Impl::edge_lambda(bool upper) const {
  const double z = upper ? hi : lo;
  const double c = spec.anchor;
  auto g = [&](double u) { return finv(u + c) - finv_c; };
  try {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double I = upper ? ts.integrate(g, 0.0, z) : -ts.integrate(g, z, 0.0);
    return std::isfinite(I) ? I + z : kInf;
  } catch (const std::exception&) {
    return kInf;
  }
}

// phi at a finite end t_lo = 1 + a - F^{-1}(c): the integral of F^{-1}(u + c) - a
// over ]lambda_-, 0[, and symmetrically at t_hi.
double CumulantFunction::Impl::edge_phi(bool upper) const {
  const double c = spec.anchor;
  try {
    if (!upper) {
      auto g = [&](double u) { return finv(u + c) - spec.a; };
      double I;
      if (std::isfinite(lo)) {
        boost::math::quadrature::tanh_sinh<double> ts;
        I = ts.integrate(g, lo, 0.0);
      } else {
        auto h = [&](double v) { return g(-v); };
        if (!(1e12 * h(1e12) < 1e-6)) return kInf;  // tail too heavy to integrate
        boost::math::quadrature::exp_sinh<double> es;
        I = es.integrate(h, 0.0, kInf);
      }
      return std::isfinite(I) && I >= 0.0 ? I : kInf;
    }
    auto g = [&](double u) { return spec.b - finv(u + c); };
    double I;
    if (std::isfinite(hi)) {
      boost::math::quadrature::tanh_sinh<double> ts;
      I = ts.integrate(g, 0.0, hi);
    } else {
      if (!(1e12 * g(1e12) < 1e-6)) return kInf;
      boost::math::quadrature::exp_sinh<double> es;
      I = es.integrate(g, 0.0, kInf);
    }
    return std::isfinite(I) && I >= 0.0 ? I : kInf;
  } catch (const std::exception&) {
    return kInf;
  }
}

double CumulantFunction::Impl::phi(double tt) const {
  if (std::isnan(tt)) return kNaN;
  if (tt > t_lo && tt < t_hi) {
    const double y = F(tt + finv_c - 1.0) - spec.anchor;
    return std::max(tt * y - lambda(y), 0.0);
  }
  auto near = [](double u, double v) { return std::isfinite(v) && std::fabs(u - v) <= 1e-12 * std::max(1.0, std::fabs(v)); };
  if (near(tt, t_lo)) return phi_lo;
  if (near(tt, t_hi)) return phi_hi;
  if (tt < t_lo) return std::isfinite(lo) ? phi_lo + lo * (tt - t_lo) : kInf;
  return std::isfinite(hi) ? phi_hi + hi * (tt - t_hi) : kInf;
}

double CumulantFunction::Impl::dphi(double tt) const {
  if (tt > t_lo && tt < t_hi) return F(tt + finv_c - 1.0) - spec.anchor;
  return tt <= t_lo ? lo : hi;
}

double CumulantFunction::operator()(double z) const { return p_->lambda(z); }
double CumulantFunction::derivative(double z) const {
  if (!(z > p_->lo && z < p_->hi)) return kNaN;
  return p_->finv(z + p_->spec.anchor) + 1.0 - p_->finv_c;
}
double CumulantFunction::lambda_minus() const { return p_->lo; }
double CumulantFunction::lambda_plus() const { return p_->hi; }

namespace {

std::shared_ptr<CumulantFunction::Impl> make_impl(const GeneratorSpec& spec) {
  require(static_cast<bool>(spec.F), "generator spec: F is missing");
  require(spec.a < 1.0 && spec.b > 1.0, "generator spec: need a < 1 < b");
  auto p = std::make_shared<CumulantFunction::Impl>();
  p->spec = spec;
  p->t = bracket_grid(spec.a, spec.b);
  // strictly increasing up to rounding: ties are dropped from the grid,
  // a decrease is an error
  std::vector<double> tg;
  for (double x : p->t) {
    const double v = spec.F(x);
    if (!std::isfinite(v)) throw DomainError("generator spec: F is not finite inside its domain");
    if (!p->Ft.empty() && v < p->Ft.back()) {
      std::ostringstream os;
      os << "generator spec: F is not increasing near t=" << x;
      throw DomainError(os.str());
    }
    if (!p->Ft.empty() && v == p->Ft.back()) continue;
    tg.push_back(x);
    p->Ft.push_back(v);
  }
  p->t = std::move(tg);
  // range of F from the endpoint limits
  auto limit = [&](bool upper) {
    const double end = upper ? spec.b : spec.a;
    double x = upper ? p->t.back() : p->t.front();
    double v = spec.F(x), diff = kInf;
    for (int k = 0; k < 400; ++k) {
      const double nx = std::isfinite(end) ? end + (x - end) * 0.5 : x * 2.0 + (upper ? 1.0 : -1.0);
      if (nx == x || nx == end || !std::isfinite(nx)) break;
      const double nv = spec.F(nx);
      if (!std::isfinite(nv)) return nv;
      diff = std::fabs(nv - v);
      x = nx;
      v = nv;
      if (diff <= 1e-14 * std::max(1.0, std::fabs(nv)) && k > 20) return nv;
    }
    // still moving at the resolution limit: logarithmic or slower divergence
    if (diff > 1e-6 * std::max(1.0, std::fabs(v))) return upper ? kInf : -kInf;
    return v;
  };
  const double Fa = limit(false), Fb = limit(true);
  const double c = spec.anchor;
  if (!(c > Fa && c < Fb)) {
    std::ostringstream os;
    os << "generator spec: anchor " << c << " is outside the open range ]" << Fa << ", " << Fb << "[ of F";
    throw DomainError(os.str());
  }
  p->lo = std::isfinite(Fa) ? Fa - c : -kInf;
  p->hi = std::isfinite(Fb) ? Fb - c : kInf;
  p->finv_c = p->finv(c);
  p->t_lo = 1.0 + spec.a - p->finv_c;
  p->t_hi = 1.0 + spec.b - p->finv_c;
  if (std::isfinite(p->t_lo)) p->phi_lo = p->edge_phi(false);
  if (std::isfinite(p->t_hi)) p->phi_hi = p->edge_phi(true);
  return p;
}

class BuiltPhi final : public CustomPhi {
 public:
  explicit BuiltPhi(std::shared_ptr<const CumulantFunction::Impl> p) : p_(std::move(p)) {}
  double value(double t) const override { return p_->phi(t); }
  double derivative(double t) const override { return p_->dphi(t); }
  double lower() const override { return std::isfinite(p_->lo) ? -kInf : p_->t_lo; }
  double upper() const override { return std::isfinite(p_->hi) ? kInf : p_->t_hi; }
  double slope_plus() const override { return p_->hi; }
  double slope_minus() const override { return -p_->lo; }

 private:
  std::shared_ptr<const CumulantFunction::Impl> p_;
};

}  // namespace

GeneratorSpec spec_from_generator(const Generator& g) {
  if (const auto* a = std::get_if<AnchoredKL>(&g.variant())) {
    const double s = a->scale;
    return {[s](double t) { return s * std::log(t); }, 0.0, kInf, s * a->anchor};
  }
  // the power generators with gamma > 2 are affine below 0, where F is flat
  double a = g.lower();
  if (const auto* pg = std::get_if<PowerGamma>(&g.variant()); pg && pg->gamma > 2.0) a = 0.0;
  return {[g](double t) { return g.derivative(t); }, a, g.upper(), 0.0};
}

CumulantFunction build_lambda(const GeneratorSpec& spec) { return CumulantFunction(make_impl(spec)); }

Generator build_phi(const GeneratorSpec& spec) {
  return Generator(Custom{std::make_shared<BuiltPhi>(make_impl(spec)), 1.0});
}

std::function<double(double)> legendre_transform(std::function<double(double)> f, double lo, double hi) {
  require(lo < hi, "legendre transform: empty domain");
  // bracketing grid in z: linear on finite domains, sinh-spaced on infinite ends
  std::vector<double> grid;
  const int m = 512;
  if (std::isfinite(lo) && std::isfinite(hi)) {
    for (int i = 1; i < m; ++i) grid.push_back(lo + (hi - lo) * i / m);
  } else {
    const double wl = std::isfinite(lo) ? std::asinh(lo) : -std::asinh(1e4);
    const double wh = std::isfinite(hi) ? std::asinh(hi) : std::asinh(1e4);
    for (int i = 1; i < m; ++i) grid.push_back(std::sinh(wl + (wh - wl) * i / m));
  }
  std::vector<double> fg(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) fg[i] = f(grid[i]);
  return [f = std::move(f), grid = std::move(grid), fg = std::move(fg), lo, hi](double t) {
    auto g = [&](double z) {
      const double v = f(z);
      return std::isfinite(v) ? z * t - v : -kInf;
    };
    size_t best = 0;
    double bv = -kInf;
    for (size_t i = 0; i < grid.size(); ++i) {
      const double v = std::isfinite(fg[i]) ? grid[i] * t - fg[i] : -kInf;
      if (v > bv) {
        bv = v;
        best = i;
      }
    }
    if (bv == -kInf) return kInf;
    const bool at_low = best == 0, at_high = best + 1 == grid.size();
    if ((at_low && !std::isfinite(lo)) || (at_high && !std::isfinite(hi))) {
      // still increasing at the end of an infinite grid
      const double far = at_low ? grid.front() * 1e3 : grid.back() * 1e3;
      if (g(far) > bv) return kInf;
    }
    const double a = at_low ? (std::isfinite(lo) ? lo : grid.front() * 1e3) : grid[best - 1];
    const double b = at_high ? (std::isfinite(hi) ? hi : grid.back() * 1e3) : grid[best + 1];
    auto neg = [&](double z) { return -g(z); };
    const auto r = boost::math::tools::brent_find_minima(neg, a, b, 52);
    double v = std::max(-r.second, bv);
    // the supremum may sit at a finite end of the domain
    if (at_low && std::isfinite(lo)) v = std::max(v, g(lo));
    if (at_high && std::isfinite(hi)) v = std::max(v, g(hi));
    return v;
  };
}

bool MeanOneReport::ok() const {
  if (!mean_ok) return false;
  for (const auto& p : points)
    if (!p.ok) return false;
  return true;
}

MeanOneReport check_mean_one(const WeightLaw& law, long N, const Vec& z, std::uint64_t seed, double k) {
  require(N >= 2, "check_mean_one: need at least two samples");
  MeanOneReport rep;
  rep.samples = N;
  Rng rng(seed, 0);
  const BlockSampler draw = law.block_sampler(0.0, 1);
  std::vector<double> s1(z.size(), 0.0), s2(z.size(), 0.0);
  double m = 0.0, m2 = 0.0;
  for (long i = 0; i < N; ++i) {
    const double w = draw(rng);
    // Welford for the mean
    const double d = w - m;
    m += d / static_cast<double>(i + 1);
    m2 += d * (w - m);
    for (size_t j = 0; j < z.size(); ++j) {
      const double e = std::exp(z[j] * w);
      s1[j] += e;
      s2[j] += e * e;
    }
  }
  const double Nd = static_cast<double>(N);
  rep.mean = m;
  rep.mean_se = std::sqrt(m2 / (Nd - 1.0) / Nd);
  rep.mean_ok = std::fabs(m - 1.0) <= k * rep.mean_se;
  for (size_t j = 0; j < z.size(); ++j) {
    MeanOneReport::Point p;
    p.z = z[j];
    p.empirical_mgf = s1[j] / Nd;
    const double var = std::max(s2[j] / Nd - p.empirical_mgf * p.empirical_mgf, 0.0) * Nd / (Nd - 1.0);
    p.mgf_se = std::sqrt(var / Nd);
    p.exact_mgf = std::exp(law.log_mgf(z[j]));
    p.ok = z[j] == 0.0 ? law.log_mgf(0.0) == 0.0 : std::fabs(p.empirical_mgf - p.exact_mgf) <= k * p.mgf_se;
    rep.points.push_back(p);
  }
  return rep;
}

}  // namespace bsopt
