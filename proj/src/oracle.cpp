#include "bsopt/oracle.hpp"

#include <cmath>

namespace bsopt {

namespace {

// calls visit(x) for every composition of N into K parts, scaled by A / N
void for_each_grid_point(int K, long N, double A, const std::function<void(const Vec&)>& visit) {
  std::vector<long> idx(K, 0);
  Vec x(K);
  std::function<void(int, long)> rec = [&](int k, long left) {
    if (k == K - 1) {
      idx[k] = left;
      for (int j = 0; j < K; ++j) x[j] = A * static_cast<double>(idx[j]) / static_cast<double>(N);
      visit(x);
      return;
    }
    for (long i = 0; i <= left; ++i) {
      idx[k] = i;
      rec(k + 1, left - i);
    }
  };
  rec(0, N);
}

double safe(double v) { return std::isnan(v) ? kInf : v; }

}  // namespace

GridMin grid_min(const std::function<double(const Vec&)>& f, int K, double A, const ConstraintSet& omega,
                 double resolution, int rounds) {
  require(K >= 1 && K <= 4, "grid oracle: K must be between 1 and 4");
  require(resolution >= 1e-4 && resolution <= 1.0, "grid oracle: resolution must be in [1e-4, 1]");
  const long N = std::lround(1.0 / resolution);
  double count = 1.0;
  for (int j = 1; j < K; ++j) count *= static_cast<double>(N + j) / j;
  require(count <= 5e7, "grid oracle: too many grid points for this resolution");

  GridMin best;
  for_each_grid_point(K, N, A, [&](const Vec& x) {
    ++best.points;
    if (!omega.contains(x)) return;
    const double v = safe(f(x));
    if (v < best.value) {
      best.value = v;
      best.argmin = x;
    }
  });
  if (best.argmin.empty() || K == 1) return best;

  // local rescans in the first K-1 coordinates; the last one closes the sum
  double h = A / static_cast<double>(N);
  const int span = 8;
  Vec y(K);
  for (int r = 0; r < rounds; ++r) {
    h /= span;
    const Vec centre = best.argmin;
    std::vector<int> off(K - 1, -span);
    while (true) {
      double s = 0.0;
      for (int j = 0; j < K - 1; ++j) {
        y[j] = centre[j] + off[j] * h;
        s += y[j];
      }
      y[K - 1] = A - s;
      ++best.points;
      if (omega.contains(y)) {
        const double v = safe(f(y));
        if (v < best.value) {
          best.value = v;
          best.argmin = y;
        }
      }
      int j = 0;
      while (j < K - 1 && ++off[j] > span) off[j++] = -span;
      if (j == K - 1) break;
    }
  }
  return best;
}

GridMin grid_min_divergence(const Generator& g, const Vec& P, const ConstraintSet& omega, double resolution,
                            int rounds) {
  return grid_min([&](const Vec& q) { return divergence(g, q, P); }, static_cast<int>(P.size()), omega.scale(), omega,
                  resolution, rounds);
}

double exact_pi(const WeightLaw& law, const BlockPartition& blocks, const std::function<bool(const Vec&)>& hit,
                double tail) {
  const int K = blocks.K();
  std::vector<std::vector<Atom>> atoms;
  double kept = 1.0, combos = 1.0;
  for (int k = 0; k < K; ++k) {
    atoms.push_back(law.atoms(0.0, blocks.sizes[k], tail / (4.0 * K)));
    double m = 0.0;
    for (const Atom& a : atoms.back()) m += a.prob;
    kept *= m;
    combos *= static_cast<double>(atoms.back().size());
  }
  if (1.0 - kept > tail) throw NumericError("exact enumeration: truncated mass exceeds the tail bound");
  if (combos > 1e8) throw NumericError("exact enumeration: support too large");

  Vec S(K);
  double total = 0.0;
  std::function<void(int, double)> rec = [&](int k, double pr) {
    if (k == K) {
      if (hit(S)) total += pr;
      return;
    }
    for (const Atom& a : atoms[k]) {
      S[k] = a.value;
      rec(k + 1, pr * a.prob);
    }
  };
  rec(0, 1.0);
  return total;
}

GoldenMin golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  require(a < b && tol > 0.0, "golden_min: need a < b and tol > 0");
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (!std::isfinite(fc) || !std::isfinite(fd)) throw NumericError("golden_min: objective is not finite");
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace bsopt
