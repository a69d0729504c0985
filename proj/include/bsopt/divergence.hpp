#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>

#include "bsopt/common.hpp"

namespace bsopt {

// Power family phi_gamma scaled by c~ = scale.  gamma in ]1,2[ is refused.
struct PowerGamma {
  double gamma = 1.0;
  double scale = 1.0;
};

// alpha > 0 or alpha in ]-1,0[; alpha = 1, scale = 1 is Jensen-Shannon.
struct GeneralizedKL {
  double alpha = 1.0;
  double scale = 1.0;
};

// Kullback-Leibler generator shifted to the anchor c, domain [1 - e^c, inf[.
struct AnchoredKL {
  double anchor = 0.0;
  double scale = 1.0;
};

struct BlendedWeightChiSq {
  double beta = 1.0;
  double scale = 1.0;
};

// Conjugate of the log-MGF of the two-point law on {z1, z2} with mean 1.
struct TwoPoint {
  double z1 = 0.0;
  double z2 = 2.0;
  double scale = 1.0;
};

struct GenAsymLaplace {
  double alpha = 1.0;
  double beta1 = 1.0;
  double beta2 = 1.0;
  double scale = 1.0;
};

// Interface implemented by numerically built generators (see legendre.hpp).
class CustomPhi {
 public:
  virtual ~CustomPhi() = default;
  virtual double value(double t) const = 0;
  virtual double derivative(double t) const = 0;
  virtual double lower() const = 0;
  virtual double upper() const = 0;
  virtual double slope_plus() const = 0;
  virtual double slope_minus() const = 0;
};

struct Custom {
  std::shared_ptr<const CustomPhi> impl;
  double scale = 1.0;
};

class Generator {
 public:
  using Variant = std::variant<PowerGamma, GeneralizedKL, AnchoredKL, BlendedWeightChiSq,
                               TwoPoint, GenAsymLaplace, Custom>;

  Generator(Variant v);  // NOLINT: implicit on purpose

  double operator()(double t) const;
  double derivative(double t) const;  // throws outside ]lower, upper[
  double lower() const;
  double upper() const;
  // lim phi(x)/x for x -> +inf and lim phi(-x)/x for x -> +inf
  double slope_plus() const;
  double slope_minus() const;
  double scale() const;
  Generator scaled(double factor) const;

  const Variant& variant() const { return v_; }
  bool is_power() const { return std::holds_alternative<PowerGamma>(v_); }
  std::string name() const;

 private:
  Variant v_;
};

// ---------------------------------------------------------------- divergences

// sum_k p_k phi(q_k / p_k) with the zero conventions; +inf allowed.
double divergence(const Generator& g, const Vec& Q, const Vec& P);
double weighted_divergence(const Generator& g, const Vec& Q, const Vec& P, const Vec& c);

struct Normalized {
  Vec p;       // P / M_P
  double mass; // M_P
};
Normalized normalize_bs1(const Vec& P);

double hellinger_integral(double gamma, const Vec& Q, const Vec& P);
double modified_kl(const Vec& Q, const Vec& P);      // sum q log(q/p)
double modified_rev_kl(const Vec& Q, const Vec& P);  // sum p log(p/q)

double renyi(double gamma, const Vec& Q, const Vec& P);

// Transforms applied to the Hellinger integral.
struct HPower { double c1 = 1, c2 = 1, c3 = 0; };
struct HLog { double c4 = 1, fprime0 = 1; };
struct HArccos { double c5 = 1, c6 = 1; };
struct HBB { double nu = 2, c7 = 1; };
using HTransform = std::variant<HPower, HLog, HArccos, HBB>;

double apply_h(const HTransform& h, double y);
double renyi_transform(const HTransform& h, double gamma, const Vec& Q, const Vec& P);
double escort_renyi(double nu1, double nu, const Vec& Q, const Vec& P);

// ---------------------------------------------------------------- entropies

enum class EntropyKind {
  General,      // c1 ((sum q^g)^c2 - c3)
  RenyiClass,   // c4/f'(0) log sum q^g
  GammaNorm,
  Hill,
  HavrdaCharvat,
  Arimoto,      // gamma field holds gamma~
  SharmaMittal1,
  PatilTaillie, // s field; gamma = s + 1
  Renyi,
  Shannon,
  SharmaMittal2
};

struct EntropySpec {
  EntropyKind kind = EntropyKind::Shannon;
  double gamma = 2.0;
  double c1 = 1.0, c2 = 1.0, c3 = 0.0;
  double c4 = 1.0, fprime0 = 1.0;
  double s = 2.0;
};

EntropySpec entropy_preset(const std::string& name, double gamma = 2.0, double s = 2.0);

// The effective parameters behind a spec: the power order used in the
// Hellinger identity, and either (c1,c2,c3) or the log-class factor.
struct EntropyForm {
  double gamma;  // 1 means the Shannon/KL branch
  bool log_class = false;
  bool kl_class = false;
  double c1 = 1, c2 = 1, c3 = 0;
  double log_factor = 1;
  double sm_s = 0;  // > 0: Sharma-Mittal-2 outer map
};
EntropyForm entropy_form(const EntropySpec& e);

double entropy(const EntropySpec& e, const Vec& Q);
// entropy as a function of D = D_{phi_gamma}(Q, uniform) for Q of total mass A
double entropy_from_divergence(const EntropySpec& e, double D, double A, int K);
// +1 if the entropy increases with the underlying divergence, -1 if it decreases
int entropy_direction(const EntropySpec& e);

// ---------------------------------------------------------------- misc

Vec flatten_matrix(const std::vector<Vec>& X);
std::vector<Vec> unflatten_matrix(const Vec& x, int rows, int cols);

struct MinOverM {
  double value;
  double m;
};
// inf over m != 0 of D_{c phi_gamma}(m Q, P) in closed form.
MinOverM min_over_m_closed(const PowerGamma& g, const Vec& Q, const Vec& P);

// Forward and inverse of the map D(Q,P) -> inf_m D(mQ,P) for P a probability
// vector and sum(Q) = A.
double min_over_m_forward(const PowerGamma& g, double D, double A);
double min_over_m_inverse(const PowerGamma& g, double v, double A);

}  // namespace bsopt
