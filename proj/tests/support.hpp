#pragma once

// Shared generators and independent oracles for the unit tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "circlept/density.hpp"
#include "circlept/fourier.hpp"
#include "circlept/types.hpp"

namespace testsupport {

using circlept::Index;
using circlept::kPi;
using circlept::kTwoPi;
using circlept::Vec;

/// Hand-rolled generator over std::mt19937_64.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  std::uint64_t bits() { return rng_(); }

  /// Positive trigonometric polynomial 1 + sum a_k cos(2 pi k (theta - s_k)), k in step*{1..harmonics},
  /// with sum |a_k| <= budget < 1.
  std::function<double(double)> trig_density(int harmonics, int step = 1, double budget = 0.9) {
    std::vector<double> amp(static_cast<std::size_t>(harmonics)), shift(static_cast<std::size_t>(harmonics));
    double total = 0.0;
    for (int i = 0; i < harmonics; ++i) {
      amp[static_cast<std::size_t>(i)] = uniform();
      shift[static_cast<std::size_t>(i)] = uniform();
      total += amp[static_cast<std::size_t>(i)];
    }
    const double scale = budget * uniform(0.05, 1.0) / total;
    for (double& a : amp) a *= scale;
    return [amp, shift, step](double t) {
      double v = 1.0;
      for (std::size_t i = 0; i < amp.size(); ++i)
        v += amp[i] * std::cos(kTwoPi * static_cast<double>(step) * static_cast<double>(i + 1) * (t - shift[i]));
      return v;
    };
  }

  circlept::Density density(Index m, int harmonics = 4, int step = 1) {
    return circlept::density_from_function(trig_density(harmonics, step), m);
  }

  Vec positions(Index n) {
    Vec x(n);
    for (Index i = 0; i < n; ++i) x[i] = uniform(-0.5, 0.5);
    return x;
  }

 private:
  std::mt19937_64 rng_;
};

/// Adaptive Simpson quadrature.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int depth) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        const double diff = left + right - whole;
        if (depth <= 0 || std::abs(diff) <= 15.0 * eps) return left + right + diff / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, eps / 2, depth - 1) +
               rec(mid, hi, fmid, frm, fhi, right, eps / 2, depth - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

/// Direct O(M^2) circular convolution (1/M) sum_j w(theta_i - theta_j) q_j.
inline Vec direct_convolution(const std::function<double(double)>& w, const Vec& q) {
  const Index m = q.size();
  Vec out = Vec::Zero(m);
  for (Index i = 0; i < m; ++i) {
    double s = 0.0;
    for (Index j = 0; j < m; ++j) s += w(static_cast<double>(i - j) / static_cast<double>(m)) * q[j];
    out[i] = s / static_cast<double>(m);
  }
  return out;
}

/// Direct double quadrature (1/M^2) sum_ij w(theta_i - theta_j) q_i q_j.
inline double direct_interaction(const std::function<double(double)>& w, const Vec& q) {
  return q.dot(direct_convolution(w, q)) / static_cast<double>(q.size());
}

/// Quantile atoms of a grid density: `atoms` equal masses at their conditional midpoints.
inline std::vector<double> quantile_atoms(const circlept::Density& q, int atoms) {
  const Index m = q.grid_size();
  const double h = 1.0 / static_cast<double>(m);
  std::vector<double> cdf(static_cast<std::size_t>(m) + 1, 0.0);
  for (Index j = 0; j < m; ++j) cdf[static_cast<std::size_t>(j) + 1] = cdf[static_cast<std::size_t>(j)] + q.values()[j] * h;
  std::vector<double> out(static_cast<std::size_t>(atoms));
  for (int a = 0; a < atoms; ++a) {
    const double t = (a + 0.5) / atoms * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), t);
    const Index j = std::clamp<Index>(static_cast<Index>(it - cdf.begin()) - 1, 0, m - 1);
    const double v = q.values()[j];
    const double frac = v > 0 ? (t - cdf[static_cast<std::size_t>(j)]) / (v * h) : 0.5;
    out[static_cast<std::size_t>(a)] = -0.5 + (static_cast<double>(j) + frac) * h;
  }
  return out;
}

/// Discrete optimal transport on the circle between two sorted equal-weight atom sets:
/// minimum over every cut (cyclic reindexing) of the quadratic cost with optimal lifting.
inline double discrete_circle_w2(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double best = 1e300;
  for (std::size_t s = 0; s < n; ++s) {
    // pair x_i with y_{i+s}, lifted by +1 after wrapping; shift every pair by the mean offset
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + s;
      d[i] = (j < n ? y[j] : y[j - n] + 1.0) - x[i];
    }
    const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    for (const double shift : {std::round(mean) - 1.0, std::round(mean), std::round(mean) + 1.0}) {
      double cost = 0.0;
      for (double v : d) cost += (v - shift) * (v - shift);
      best = std::min(best, cost / static_cast<double>(n));
    }
  }
  return std::sqrt(best);
}

/// 30-term power series for I_l(x) in long double.
inline long double bessel_series_30(int order, long double x) {
  long double term = 1.0L;
  for (int i = 1; i <= order; ++i) term *= (x / 2) / i;
  long double sum = 0.0L;
  for (int k = 0; k < 30; ++k) {
    sum += term;
    term *= (x / 2) * (x / 2) / ((k + 1.0L) * (k + 1.0L + order));
  }
  return sum;
}

/// Bound on the omitted series terms after 30 (geometric, valid when the ratio is < 1).
inline long double bessel_series_30_remainder(int order, long double x) {
  long double term = 1.0L;
  for (int i = 1; i <= order; ++i) term *= (x / 2) / i;
  for (int k = 0; k < 30; ++k) term *= (x / 2) * (x / 2) / ((k + 1.0L) * (k + 1.0L + order));
  const long double r = (x / 2) * (x / 2) / (31.0L * (31.0L + order));
  return term / (1.0L - r);
}

/// Empirical slope of log(y) on log(x).
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testsupport
