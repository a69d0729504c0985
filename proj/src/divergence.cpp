#include "bsopt/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bsopt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// ---- power family

double power_phi(double g, double c, double t) {
  if (g == 1.0) {
    if (t < 0.0) return kInf;
    if (t == 0.0) return c;
    return c * (t * std::log(t) - t + 1.0);
  }
  if (g == 0.0) {
    if (t <= 0.0) return kInf;
    return c * (-std::log(t) + t - 1.0);
  }
  if (g == 2.0) return 0.5 * c * (t - 1.0) * (t - 1.0);
  if (g > 2.0) {
    if (t <= 0.0) return c * (1.0 / g - t / (g - 1.0));
  } else if (g > 0.0) {
    if (t < 0.0) return kInf;
    if (t == 0.0) return c / g;
  } else if (t <= 0.0) {
    return kInf;
  }
  return c * (std::pow(t, g) - g * t + g - 1.0) / (g * (g - 1.0));
}

double power_dphi(double g, double c, double t) {
  if (g == 1.0) return c * std::log(t);
  if (g == 0.0) return c * (1.0 - 1.0 / t);
  if (g == 2.0) return c * (t - 1.0);
  if (g > 2.0 && t <= 0.0) return -c / (g - 1.0);
  return c * (std::pow(t, g - 1.0) - 1.0) / (g - 1.0);
}

// ---- generalized asymmetric Laplace: x is the shifted argument used throughout

double gal_x(const GenAsymLaplace& g, double t) {
  return (1.0 - t) / g.alpha + 1.0 / g.beta2 - 1.0 / g.beta1;
}

double gal_phi(const GenAsymLaplace& g, double t) {
  const double x = gal_x(g, t);
  const double B = g.beta1 + g.beta2;
  const double r = std::sqrt(4.0 + B * B * x * x);
  const double first = 0.5 * (r - x * (g.beta1 - g.beta2) - 2.0);
  // (r - 2) / (b1 b2 x^2) rewritten to avoid 0/0 at x = 0
  const double lg = std::log(B * B / ((r + 2.0) * g.beta1 * g.beta2));
  return g.scale * g.alpha * (first + lg);
}

double gal_dphi(const GenAsymLaplace& g, double t) {
  const double x = gal_x(g, t);
  const double B = g.beta1 + g.beta2;
  const double r = std::sqrt(4.0 + B * B * x * x);
  return g.scale * (0.5 * (g.beta1 - g.beta2) - x * B * B / (2.0 * (2.0 + r)));
}

}  // namespace

// ------------------------------------------------------------------ Generator

Generator::Generator(Variant v) : v_(std::move(v)) {
  std::visit(
      overloaded{
          [](const PowerGamma& g) {
            require(g.scale > 0.0, "power generator: scale must be > 0");
            require(std::isfinite(g.gamma), "power generator: gamma must be finite");
            if (g.gamma > 1.0 && g.gamma < 2.0)
              throw DomainError(
                  "power generator: gamma in ]1,2[ has no known simulation law and is not supported");
          },
          [](const GeneralizedKL& g) {
            require(g.scale > 0.0, "generalized KL: scale must be > 0");
            require(g.alpha > -1.0 && g.alpha != 0.0, "generalized KL: alpha must be in ]-1,0[ or > 0");
          },
          [](const AnchoredKL& g) {
            require(std::isfinite(g.anchor), "anchored KL: anchor must be finite");
            require(g.scale > 0.0, "anchored KL: scale must be > 0");
          },
          [](const BlendedWeightChiSq& g) {
            require(g.beta > 0.0 && g.beta <= 1.0, "blended chi-square: beta must be in ]0,1]");
            require(g.scale > 0.0, "blended chi-square: scale must be > 0");
          },
          [](const TwoPoint& g) {
            require(g.z1 < 1.0 && g.z2 > 1.0, "two-point: need z1 < 1 < z2");
            require(g.scale > 0.0, "two-point: scale must be > 0");
          },
          [](const GenAsymLaplace& g) {
            require(g.alpha > 0.0 && g.beta1 > 0.0 && g.beta2 > 0.0 && g.scale > 0.0,
                    "asymmetric Laplace: all parameters must be > 0");
          },
          [](const Custom& g) {
            require(g.impl != nullptr, "custom generator: missing implementation");
            require(g.scale > 0.0, "custom generator: scale must be > 0");
          }},
      v_);
}

double Generator::operator()(double t) const {
  if (std::isnan(t)) return kNaN;
  return std::visit(
      overloaded{
          [t](const PowerGamma& g) { return power_phi(g.gamma, g.scale, t); },
          [t](const GeneralizedKL& g) {
            const double a = g.alpha;
            if (t < 0.0) return kInf;
            if (a < 0.0 && t > -1.0 / a) return kInf;
            if (t == 0.0) return g.scale * std::log1p(a) / a;
            if (a < 0.0 && t == -1.0 / a) return g.scale * xlogx(t);
            return g.scale * (xlogx(t) + (t + 1.0 / a) * std::log((1.0 + a) / (1.0 + a * t)));
          },
          [t](const AnchoredKL& g) {
            const double ec = std::exp(g.anchor);
            const double u = t + ec - 1.0;
            if (u < 0.0) return kInf;
            if (u == 0.0) return g.scale * ec;
            return g.scale * (u * (std::log(u) - g.anchor) - t + 1.0);
          },
          [t](const BlendedWeightChiSq& g) {
            const double d = g.beta * t + 1.0 - g.beta;
            if (d <= 0.0) return kInf;
            return g.scale * (t - 1.0) * (t - 1.0) / (2.0 * d);
          },
          [t](const TwoPoint& g) {
            if (t < g.z1 || t > g.z2) return kInf;
            const double p = (g.z2 - 1.0) / (g.z2 - g.z1);
            const double w = (g.z2 - t) / (g.z2 - g.z1);
            const double kl = xlogx(w) - w * std::log(p) + xlogx(1.0 - w) - (1.0 - w) * std::log(1.0 - p);
            return g.scale * std::max(kl, 0.0);
          },
          [t](const GenAsymLaplace& g) {
            if (!std::isfinite(t)) return kInf;
            return gal_phi(g, t);
          },
          [t](const Custom& g) { return g.scale * g.impl->value(t); }},
      v_);
}

double Generator::derivative(double t) const {
  if (!(t > lower() && t < upper())) {
    std::ostringstream os;
    os << name() << ": derivative requested at t=" << t << " outside the open domain";
    throw DomainError(os.str());
  }
  return std::visit(
      overloaded{
          [t](const PowerGamma& g) { return power_dphi(g.gamma, g.scale, t); },
          [t](const GeneralizedKL& g) {
            return g.scale * std::log((1.0 + g.alpha) * t / (1.0 + g.alpha * t));
          },
          [t](const AnchoredKL& g) {
            return g.scale * (std::log(t + std::exp(g.anchor) - 1.0) - g.anchor);
          },
          [t](const BlendedWeightChiSq& g) {
            const double d = g.beta * t + 1.0 - g.beta;
            return g.scale * (t - 1.0) * (g.beta * t + 2.0 - g.beta) / (2.0 * d * d);
          },
          [t](const TwoPoint& g) {
            return g.scale / (g.z2 - g.z1) *
                   std::log((t - g.z1) * (g.z2 - 1.0) / ((g.z2 - t) * (1.0 - g.z1)));
          },
          [t](const GenAsymLaplace& g) { return gal_dphi(g, t); },
          [t](const Custom& g) { return g.scale * g.impl->derivative(t); }},
      v_);
}

double Generator::lower() const {
  return std::visit(overloaded{[](const PowerGamma& g) { return g.gamma >= 2.0 ? -kInf : 0.0; },
                               [](const GeneralizedKL&) { return 0.0; },
                               [](const AnchoredKL& g) { return 1.0 - std::exp(g.anchor); },
                               [](const BlendedWeightChiSq& g) { return 1.0 - 1.0 / g.beta; },
                               [](const TwoPoint& g) { return g.z1; },
                               [](const GenAsymLaplace&) { return -kInf; },
                               [](const Custom& g) { return g.impl->lower(); }},
                    v_);
}

double Generator::upper() const {
  return std::visit(overloaded{[](const PowerGamma&) { return kInf; },
                               [](const GeneralizedKL& g) { return g.alpha < 0.0 ? -1.0 / g.alpha : kInf; },
                               [](const AnchoredKL&) { return kInf; },
                               [](const BlendedWeightChiSq&) { return kInf; },
                               [](const TwoPoint& g) { return g.z2; },
                               [](const GenAsymLaplace&) { return kInf; },
                               [](const Custom& g) { return g.impl->upper(); }},
                    v_);
}

double Generator::slope_plus() const {
  return std::visit(
      overloaded{[](const PowerGamma& g) { return g.gamma < 1.0 ? g.scale / (1.0 - g.gamma) : kInf; },
                 [](const GeneralizedKL& g) {
                   return g.alpha > 0.0 ? g.scale * std::log((1.0 + g.alpha) / g.alpha) : kInf;
                 },
                 [](const AnchoredKL&) { return kInf; },
                 [](const BlendedWeightChiSq& g) { return g.scale / (2.0 * g.beta); },
                 [](const TwoPoint&) { return kInf; },
                 [](const GenAsymLaplace& g) { return g.scale * g.beta1; },
                 [](const Custom& g) { return g.scale * g.impl->slope_plus(); }},
      v_);
}

double Generator::slope_minus() const {
  return std::visit(
      overloaded{[](const PowerGamma& g) { return g.gamma > 2.0 ? g.scale / (g.gamma - 1.0) : kInf; },
                 [](const GeneralizedKL&) { return kInf; },
                 [](const AnchoredKL&) { return kInf; },
                 [](const BlendedWeightChiSq&) { return kInf; },
                 [](const TwoPoint&) { return kInf; },
                 [](const GenAsymLaplace& g) { return g.scale * g.beta2; },
                 [](const Custom& g) { return g.scale * g.impl->slope_minus(); }},
      v_);
}

double Generator::scale() const {
  return std::visit([](const auto& g) { return g.scale; }, v_);
}

Generator Generator::scaled(double factor) const {
  require(factor > 0.0, "generator rescaling factor must be > 0");
  Variant w = v_;
  std::visit([factor](auto& g) { g.scale *= factor; }, w);
  return Generator(w);
}

std::string Generator::name() const {
  std::ostringstream os;
  std::visit(overloaded{[&](const PowerGamma& g) { os << "power(gamma=" << g.gamma << ",scale=" << g.scale << ")"; },
                        [&](const GeneralizedKL& g) { os << "generalized_kl(alpha=" << g.alpha << ",scale=" << g.scale << ")"; },
                        [&](const AnchoredKL& g) { os << "anchored_kl(c=" << g.anchor << ",scale=" << g.scale << ")"; },
                        [&](const BlendedWeightChiSq& g) { os << "blended_chi2(beta=" << g.beta << ",scale=" << g.scale << ")"; },
                        [&](const TwoPoint& g) { os << "two_point(z1=" << g.z1 << ",z2=" << g.z2 << ",scale=" << g.scale << ")"; },
                        [&](const GenAsymLaplace& g) {
                          os << "asym_laplace(alpha=" << g.alpha << ",beta1=" << g.beta1 << ",beta2=" << g.beta2
                             << ",scale=" << g.scale << ")";
                        },
                        [&](const Custom& g) { os << "custom(scale=" << g.scale << ")"; }},
             v_);
  return os.str();
}

// ---------------------------------------------------------------- divergences

namespace {

void check_pair(const Vec& Q, const Vec& P) {
  require(!P.empty(), "empty reference vector");
  require(Q.size() == P.size(), "dimension mismatch between Q and P");
  for (double p : P) require(std::isfinite(p) && p >= 0.0, "reference vector must be finite and nonnegative");
  for (double q : Q) require(std::isfinite(q), "Q must be finite");
}

double term(const Generator& g, double q, double p) {
  if (p > 0.0) return p * g(q / p);
  if (q == 0.0) return 0.0;
  if (q > 0.0) return q * g.slope_plus();
  return -q * g.slope_minus();
}

}  // namespace

double divergence(const Generator& g, const Vec& Q, const Vec& P) {
  check_pair(Q, P);
  double s = 0.0;
  for (size_t k = 0; k < P.size(); ++k) {
    const double t = term(g, Q[k], P[k]);
    if (t == kInf) return kInf;
    s += t;
  }
  return s;
}

double weighted_divergence(const Generator& g, const Vec& Q, const Vec& P, const Vec& c) {
  check_pair(Q, P);
  require(c.size() == P.size(), "weight vector has wrong length");
  double s = 0.0;
  for (size_t k = 0; k < P.size(); ++k) {
    require(c[k] > 0.0, "weights must be positive");
    const double t = term(g, Q[k], P[k]);
    if (t == kInf) return kInf;
    s += c[k] * t;
  }
  return s;
}

Normalized normalize_bs1(const Vec& P) {
  require(!P.empty(), "empty reference vector");
  double m = 0.0;
  for (double p : P) {
    require(std::isfinite(p) && p >= 0.0, "reference vector must be finite and nonnegative");
    m += p;
  }
  require(m > 0.0, "reference vector is identically zero");
  Normalized out{Vec(P.size()), m};
  for (size_t k = 0; k < P.size(); ++k) out.p[k] = P[k] / m;
  return out;
}

double hellinger_integral(double gamma, const Vec& Q, const Vec& P) {
  check_pair(Q, P);
  double s = 0.0;
  for (size_t k = 0; k < P.size(); ++k) {
    const double q = Q[k], p = P[k];
    if (q < 0.0) {
      require(gamma == 2.0 && p > 0.0, "Hellinger integral: negative Q entries only for gamma = 2");
      s += q * q / p;
      continue;
    }
    if (p == 0.0) {
      if (q == 0.0) continue;
      if (gamma > 1.0) return kInf;
      if (gamma == 1.0) s += q;
      continue;
    }
    if (q == 0.0) {
      if (gamma < 0.0) return kInf;
      if (gamma == 0.0) s += p;
      continue;
    }
    s += std::pow(q, gamma) * std::pow(p, 1.0 - gamma);
  }
  return s;
}

double modified_kl(const Vec& Q, const Vec& P) {
  check_pair(Q, P);
  double s = 0.0;
  for (size_t k = 0; k < P.size(); ++k) {
    require(Q[k] >= 0.0, "modified KL: Q must be nonnegative");
    if (Q[k] == 0.0) continue;
    if (P[k] == 0.0) return kInf;
    s += Q[k] * std::log(Q[k] / P[k]);
  }
  return s;
}

double modified_rev_kl(const Vec& Q, const Vec& P) {
  check_pair(Q, P);
  double s = 0.0;
  for (size_t k = 0; k < P.size(); ++k) {
    require(Q[k] >= 0.0, "modified reverse KL: Q must be nonnegative");
    if (P[k] == 0.0) continue;
    if (Q[k] == 0.0) return kInf;
    s += P[k] * std::log(P[k] / Q[k]);
  }
  return s;
}

double renyi(double gamma, const Vec& Q, const Vec& P) {
  require(gamma != 0.0 && gamma != 1.0, "Renyi divergence: gamma must differ from 0 and 1");
  const double H = hellinger_integral(gamma, Q, P);
  require(H > 0.0, "Renyi divergence: Hellinger integral must be positive");
  return std::log(H) / (gamma * (gamma - 1.0));
}

double apply_h(const HTransform& h, double y) {
  return std::visit(
      overloaded{[y](const HPower& f) {
                   require(y > 0.0, "h-transform: argument must be > 0");
                   require(f.c1 != 0.0 && f.c2 != 0.0, "h-transform: c1, c2 must be nonzero");
                   return f.c1 * (std::pow(y, f.c2) - f.c3);
                 },
                 [y](const HLog& f) {
                   require(y > 0.0, "log transform: argument must be > 0");
                   require(f.c4 != 0.0 && f.fprime0 != 0.0, "log transform: c4 and f'(0) must be nonzero");
                   return f.c4 / f.fprime0 * std::log(y);
                 },
                 [y](const HArccos& f) {
                   require(y > 0.0 && y <= 1.0, "arccos transform: argument must lie in ]0,1]");
                   require(f.c5 > 0.0 && f.c6 > 0.0, "arccos transform: c5, c6 must be > 0");
                   return f.c5 * std::pow(std::acos(y), f.c6);
                 },
                 [y](const HBB& f) {
                   require(y > 0.0 && y <= 1.0, "BB transform: argument must lie in ]0,1]");
                   require(f.c7 > 0.0 && (f.nu < 0.0 || f.nu > 1.0), "BB transform: need c7 > 0, nu < 0 or nu > 1");
                   return f.c7 * std::log(1.0 - (1.0 - y) / f.nu) / std::log(1.0 - 1.0 / f.nu);
                 }},
      h);
}

double renyi_transform(const HTransform& h, double gamma, const Vec& Q, const Vec& P) {
  return apply_h(h, hellinger_integral(gamma, Q, P));
}

double escort_renyi(double nu1, double nu, const Vec& Q, const Vec& P) {
  check_pair(Q, P);
  require(nu != nu1 && nu1 != 0.0, "escort Renyi: need nu != nu1 and nu1 != 0");
  double s_qp = 0.0, s_q = 0.0, s_p = 0.0;
  for (size_t k = 0; k < P.size(); ++k) {
    require(Q[k] >= 0.0 && P[k] > 0.0, "escort Renyi: need Q >= 0 and P > 0");
    if (Q[k] > 0.0) {
      s_qp += std::pow(Q[k], nu) * std::pow(P[k], nu1 - nu);
      s_q += std::pow(Q[k], nu1);
    }
    s_p += std::pow(P[k], nu1);
  }
  require(s_qp > 0.0 && s_q > 0.0, "escort Renyi: degenerate Q");
  return nu1 / (nu - nu1) * std::log(s_qp) - nu / (nu - nu1) * std::log(s_q) + std::log(s_p);
}

// ---------------------------------------------------------------- entropies

EntropySpec entropy_preset(const std::string& name, double gamma, double s) {
  EntropySpec e;
  e.gamma = gamma;
  e.s = s;
  if (name == "shannon") e.kind = EntropyKind::Shannon;
  else if (name == "renyi") e.kind = EntropyKind::Renyi;
  else if (name == "havrda-charvat" || name == "tsallis") e.kind = EntropyKind::HavrdaCharvat;
  else if (name == "arimoto") e.kind = EntropyKind::Arimoto;
  else if (name == "sharma-mittal-1") e.kind = EntropyKind::SharmaMittal1;
  else if (name == "sharma-mittal-2") e.kind = EntropyKind::SharmaMittal2;
  else if (name == "patil-taillie") e.kind = EntropyKind::PatilTaillie;
  else if (name == "hill") e.kind = EntropyKind::Hill;
  else if (name == "gamma-norm") e.kind = EntropyKind::GammaNorm;
  else throw DomainError("unknown entropy preset '" + name + "'");
  return e;
}

EntropyForm entropy_form(const EntropySpec& e) {
  EntropyForm f{e.gamma};
  const double g = e.gamma;
  switch (e.kind) {
    case EntropyKind::General:
      f.c1 = e.c1, f.c2 = e.c2, f.c3 = e.c3;
      break;
    case EntropyKind::RenyiClass:
      require(e.c4 != 0.0 && e.fprime0 != 0.0, "entropy: c4 and f'(0) must be nonzero");
      f.log_class = true;
      f.log_factor = e.c4 / e.fprime0;
      break;
    case EntropyKind::GammaNorm:
      require(g != 0.0, "gamma-norm: gamma must be nonzero");
      f.c1 = 1.0, f.c2 = 1.0 / g, f.c3 = 0.0;
      break;
    case EntropyKind::Hill:
      require(g != 1.0, "Hill number: gamma must differ from 1");
      f.c1 = 1.0, f.c2 = 1.0 / (g - 1.0), f.c3 = 0.0;
      break;
    case EntropyKind::HavrdaCharvat:
      require(g != 1.0, "Havrda-Charvat: gamma must differ from 1");
      f.c1 = 1.0 / (std::pow(2.0, 1.0 - g) - 1.0), f.c2 = 1.0, f.c3 = 1.0;
      break;
    case EntropyKind::Arimoto:
      require(g != 0.0 && g != 1.0, "Arimoto: gamma~ must differ from 0 and 1");
      f.gamma = 1.0 / g;
      f.c1 = 1.0 / (g - 1.0), f.c2 = g, f.c3 = 1.0;
      break;
    case EntropyKind::SharmaMittal1:
      require(e.s != 1.0 && g != 1.0, "Sharma-Mittal: need s != 1 and gamma != 1");
      f.c1 = 1.0 / (1.0 - e.s), f.c2 = (1.0 - e.s) / (1.0 - g), f.c3 = 1.0;
      break;
    case EntropyKind::PatilTaillie:
      require(e.s != 0.0, "Patil-Taillie: s must be nonzero");
      f.gamma = e.s + 1.0;
      f.c1 = -1.0 / e.s, f.c2 = 1.0, f.c3 = 1.0;
      break;
    case EntropyKind::Renyi:
      require(g != 1.0, "Renyi entropy: gamma must differ from 1");
      f.log_class = true;
      f.log_factor = 1.0 / (1.0 - g);
      break;
    case EntropyKind::Shannon:
      f.gamma = 1.0;
      f.kl_class = true;
      break;
    case EntropyKind::SharmaMittal2:
      require(e.s > 0.0 && e.s != 1.0, "Sharma-Mittal (second type): s must be in ]0,1[ or > 1");
      f.gamma = 1.0;
      f.kl_class = true;
      f.sm_s = e.s;
      break;
  }
  if (!f.kl_class && !f.log_class)
    require(f.c1 != 0.0 && f.c2 != 0.0, "entropy: c1 and c2 must be nonzero");
  if (!f.kl_class) require(f.gamma != 1.0, "entropy: power order must differ from 1");
  return f;
}

namespace {

double kl_outer(const EntropyForm& f, double sum_qlogq) {
  if (f.sm_s > 0.0) return std::expm1((f.sm_s - 1.0) * sum_qlogq) / (1.0 - f.sm_s);
  return -sum_qlogq;
}

double power_outer(const EntropyForm& f, double S) {
  require(S > 0.0, "entropy: sum of powers must be positive");
  if (f.log_class) return f.log_factor * std::log(S);
  return f.c1 * (std::pow(S, f.c2) - f.c3);
}

}  // namespace

double entropy(const EntropySpec& e, const Vec& Q) {
  require(!Q.empty(), "entropy: empty vector");
  for (double q : Q) require(std::isfinite(q) && q >= 0.0, "entropy: Q must be finite and nonnegative");
  const EntropyForm f = entropy_form(e);
  if (f.kl_class) {
    double y = 0.0;
    for (double q : Q) y += xlogx(q);
    return kl_outer(f, y);
  }
  double S = 0.0;
  for (double q : Q) {
    if (q == 0.0) {
      require(f.gamma >= 0.0, "entropy: zero entries are not allowed for a negative order");
      if (f.gamma == 0.0) S += 1.0;
      continue;
    }
    S += std::pow(q, f.gamma);
  }
  return power_outer(f, S);
}

double entropy_from_divergence(const EntropySpec& e, double D, double A, int K) {
  require(K >= 1 && A > 0.0, "entropy: need K >= 1 and A > 0");
  const EntropyForm f = entropy_form(e);
  if (f.kl_class) {
    const double I = D + A - 1.0;
    const double sh = A * std::log(static_cast<double>(K)) - I;
    return kl_outer(f, -sh);
  }
  const double g = f.gamma;
  const double H = 1.0 + g * (A - 1.0) + g * (g - 1.0) * D;
  const double S = std::pow(static_cast<double>(K), 1.0 - g) * H;
  return power_outer(f, S);
}

int entropy_direction(const EntropySpec& e) {
  const EntropyForm f = entropy_form(e);
  if (f.kl_class) return -1;
  const double g = f.gamma;
  const double inner = g * (g - 1.0);
  const double outer = f.log_class ? f.log_factor : f.c1 * f.c2;
  return inner * outer > 0.0 ? 1 : -1;
}

// ---------------------------------------------------------------- misc

Vec flatten_matrix(const std::vector<Vec>& X) {
  Vec out;
  for (const Vec& row : X) {
    require(row.size() == X.front().size(), "flatten: ragged matrix");
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

std::vector<Vec> unflatten_matrix(const Vec& x, int rows, int cols) {
  require(rows >= 1 && cols >= 1 && static_cast<size_t>(rows) * cols == x.size(), "unflatten: shape mismatch");
  std::vector<Vec> out(rows, Vec(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out[i][j] = x[static_cast<size_t>(i) * cols + j];
  return out;
}

namespace {

// A^gamma allowing A < 0 only for gamma = 2
double signed_pow(double A, double g) {
  if (A > 0.0) return std::pow(A, g);
  require(g == 2.0 && A != 0.0, "total mass A must be > 0 (A < 0 only for gamma = 2)");
  return A * A;
}

}  // namespace

double min_over_m_forward(const PowerGamma& pg, double D, double A) {
  const double g = pg.gamma, c = pg.scale;
  require(A != 0.0 && (A > 0.0 || g == 2.0), "total mass A must be > 0 (A < 0 only for gamma = 2)");
  if (g == 0.0) return D - c * (A - 1.0 - std::log(A));
  if (g == 1.0) {
    const double I = D / c + A - 1.0;
    return c * (1.0 - A * std::exp(-I / A));
  }
  const double H = 1.0 + g * (A - 1.0) + g * (g - 1.0) * D / c;
  require(H > 0.0, "inadmissible triple: Hellinger integral must be positive");
  const double mA = g == 2.0 ? A * A / H : std::pow(A, g / (g - 1.0)) * std::pow(H, -1.0 / (g - 1.0));
  return c / g * (1.0 - mA);
}

double min_over_m_inverse(const PowerGamma& pg, double v, double A) {
  const double g = pg.gamma, c = pg.scale;
  require(A != 0.0 && (A > 0.0 || g == 2.0), "total mass A must be > 0 (A < 0 only for gamma = 2)");
  if (g == 0.0) return v + c * (A - 1.0 - std::log(A));
  if (g == 1.0) {
    const double r = (1.0 - v / c) / A;
    if (!(r > 0.0)) throw NumericError("inversion undefined: n too small for this constraint set");
    const double I = -A * std::log(r);
    return c * (I - A + 1.0);
  }
  const double base = 1.0 - g * v / c;
  if (!(base > 0.0)) throw NumericError("inversion undefined: n too small for this constraint set");
  const double H = std::pow(base, 1.0 - g) * signed_pow(A, g);
  return c * (H - 1.0 - g * (A - 1.0)) / (g * (g - 1.0));
}

MinOverM min_over_m_closed(const PowerGamma& pg, const Vec& Q, const Vec& P) {
  Generator gen(pg);
  const Normalized nb = normalize_bs1(P);
  require(Q.size() == P.size(), "dimension mismatch between Q and P");
  const double g = pg.gamma;
  Vec q(Q.size());
  double A = 0.0;
  for (size_t k = 0; k < Q.size(); ++k) {
    require(Q[k] >= 0.0 || g == 2.0, "inadmissible triple: Q must be nonnegative");
    q[k] = Q[k] / nb.mass;
    A += q[k];
  }
  require(A != 0.0 && (A > 0.0 || g == 2.0), "inadmissible triple: total mass must be > 0");
  const PowerGamma ps{g, pg.scale * nb.mass};
  const double D = divergence(Generator(ps), q, nb.p);
  require(std::isfinite(D), "inadmissible triple: divergence is infinite");
  double m;
  if (g == 0.0) {
    m = 1.0 / A;
  } else if (g == 1.0) {
    m = std::exp(-(D / ps.scale + A - 1.0) / A);
  } else {
    const double H = 1.0 + g * (A - 1.0) + g * (g - 1.0) * D / ps.scale;
    require(H > 0.0, "inadmissible triple: Hellinger integral must be positive");
    m = g == 2.0 ? A / H : std::pow(H / A, 1.0 / (1.0 - g));
  }
  return {min_over_m_forward(ps, D, A), m};
}

}  // namespace bsopt
