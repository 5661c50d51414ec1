#include "circlept/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace circlept {

namespace {

// (1+x) log(1+x) - x
double entropy_density(double x) {
  if (x <= -1.0) return 1.0;
  if (std::abs(x) < 0.1) {
    double sum = 0.0;
    double power = x * x;
    for (int m = 2; m < 40; ++m) {
      const double term = power / (static_cast<double>(m) * static_cast<double>(m - 1));
      sum += (m % 2 == 0) ? term : -term;
      if (std::abs(term) < 1e-22 * std::abs(sum)) break;
      power *= x;
    }
    return sum;
  }
  return (1.0 + x) * std::log1p(x) - x;
}

Index resolved_modes(const Potential& w, Index m) { return std::min(w.truncation(), m / 2); }

void require_same_grid(const Density& p, const Density& q) {
  if (p.grid_size() != q.grid_size())
    throw Error(ErrorCode::GridMismatch,
                "grid sizes " + std::to_string(p.grid_size()) + " and " + std::to_string(q.grid_size()));
}

// Piecewise-linear quantile of a piecewise-constant density on [0, 1).
struct Quantile {
  std::vector<double> cum;  // size M+1, cum[0] = 0, cum[M] = 1
  double inv_m = 0.0;

  explicit Quantile(const Vec& values) : cum(static_cast<std::size_t>(values.size() + 1)) {
    const Index m = values.size();
    inv_m = 1.0 / static_cast<double>(m);
    const double total = values.sum();
    for (Index j = 0; j < m; ++j) cum[static_cast<std::size_t>(j + 1)] = cum[static_cast<std::size_t>(j)] + values[j] / total;
    cum.back() = 1.0;
  }

  // Piece containing `probe`, evaluated at t (both in [0, 1)).
  double eval(double probe, double t) const {
    auto it = std::upper_bound(cum.begin(), cum.end(), probe);
    std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cum.begin() - 1, 0));
    j = std::min(j, cum.size() - 2);
    const double mass = cum[j + 1] - cum[j];
    const double frac = mass > 0.0 ? (t - cum[j]) / mass : 0.0;
    return (static_cast<double>(j) + frac) * inv_m;
  }
};

double circular_cost(const Quantile& f, const Quantile& g, double alpha) {
  std::vector<double> breaks;
  breaks.reserve(2 * f.cum.size() + 2);
  for (double c : g.cum) breaks.push_back(c);
  for (double c : f.cum) {
    for (double s = c - alpha - 2.0; s <= 1.0; s += 1.0)
      if (s > 0.0 && s < 1.0) breaks.push_back(s);
  }
  std::sort(breaks.begin(), breaks.end());

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i];
    const double b = breaks[i + 1];
    if (b <= a) continue;
    const double mid = 0.5 * (a + b);
    const double shifted = mid + alpha;
    const double wrap = std::floor(shifted);
    const double probe = shifted - wrap;
    const double fa = f.eval(probe, a + alpha - wrap) + wrap;
    const double fb = f.eval(probe, b + alpha - wrap) + wrap;
    const double d0 = fa - g.eval(mid, a);
    const double d1 = fb - g.eval(mid, b);
    total += (b - a) * (d0 * d0 + d0 * d1 + d1 * d1) / 3.0;
  }
  return total;
}

double w2_circle(const Density& p, const Density& q) {
  const Quantile f(p.values());
  const Quantile g(q.values());
  // golden-section search; the cost is convex in alpha
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = -1.0;
  double hi = 1.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = circular_cost(f, g, x1);
  double f2 = circular_cost(f, g, x2);
  while (hi - lo > 1e-10) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = circular_cost(f, g, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = circular_cost(f, g, x2);
    }
  }
  const double best = std::min({f1, f2, circular_cost(f, g, 0.5 * (lo + hi))});
  return std::sqrt(std::max(best, 0.0));
}

}  // namespace

double relative_entropy(const Density& q) {
  if (q.min_raw_value() < -1e-12)
    throw Error(ErrorCode::NegativeDensity, "grid value " + std::to_string(q.min_raw_value()) + " below -1e-12");
  double sum = 0.0;
  for (Index j = 0; j < q.grid_size(); ++j) sum += entropy_density(q.values()[j] - 1.0);
  return sum / static_cast<double>(q.grid_size());
}

double dual_dirichlet_sum(const Density& q, int n) {
  const Index m = q.grid_size();
  double sum = 0.0;
  for (Index k = 1; k <= m / 2; ++k)
    sum += 0.5 * parseval_weight(k, m) * std::norm(q.fourier()[k]) / static_cast<double>(k);
  return static_cast<double>(n + 1) * sum;
}

double interaction_energy(const Density& q, const Potential& w, std::optional<double> tail_tolerance) {
  const Index m = q.grid_size();
  const Index top = resolved_modes(w, m);
  if (tail_tolerance) {
    const double tail = w.tail_bound(top);
    if (tail > *tail_tolerance)
      throw Error(ErrorCode::TruncationTooCoarse,
                  "tail bound " + std::to_string(tail) + " beyond mode " + std::to_string(top) + " exceeds tolerance");
  }
  double sum = 0.0;
  for (Index k = 1; k <= top; ++k) sum += parseval_weight(k, m) * w.coeff(k) * std::norm(q.fourier()[k]);
  return sum;
}

double free_energy(const Density& q, const Potential& w, double k) {
  return relative_entropy(q) - k * interaction_energy(q, w);
}

CVec convolve_fourier(const Potential& w, const CVec& q_hat) {
  CVec out = CVec::Zero(q_hat.size());
  const Index top = std::min(w.truncation(), q_hat.size() - 1);
  for (Index k = 1; k <= top; ++k) out[k] = w.coeff(k) * q_hat[k];
  return out;
}

Vec convolve(const Potential& w, const Density& q) {
  return to_grid(convolve_fourier(w, q.fourier()), q.grid_size());
}

Vec convolve_derivative(const Potential& w, const Density& q) {
  const Index m = q.grid_size();
  CVec c = convolve_fourier(w, q.fourier());
  for (Index k = 0; k <= m / 2; ++k) c[k] *= Complex(0.0, kTwoPi * static_cast<double>(k));
  c[m / 2] = Complex(0.0, 0.0);
  return to_grid(c, m);
}

const char* metric_name(Metric metric) {
  switch (metric) {
    case Metric::L1: return "L1";
    case Metric::L2: return "L2";
    case Metric::W2Circle: return "W2_circle";
  }
  return "unknown";
}

double distance(const Density& p, const Density& q, Metric metric) {
  require_same_grid(p, q);
  if (p.values() == q.values()) return 0.0;
  switch (metric) {
    case Metric::L1: return (p.values() - q.values()).cwiseAbs().mean();
    case Metric::L2: return std::sqrt((p.values() - q.values()).squaredNorm() / static_cast<double>(p.grid_size()));
    case Metric::W2Circle: return w2_circle(p, q);
  }
  return 0.0;
}

}  // namespace circlept
