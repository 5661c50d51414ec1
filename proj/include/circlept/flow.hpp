#pragma once

// McKean-Vlasov gradient flow  dq/dt = (1/2) q'' - K (q (W*q)')'  on the torus,
// the log-gas Fourier hierarchy, and relaxation-rate fits.

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "circlept/density.hpp"
#include "circlept/potential.hpp"
#include "circlept/spectral.hpp"

namespace circlept {

/// One ETD-RK2 (Cox-Matthews) step: diffusion by the exact factor e^{-2 pi^2 k^2 dt},
/// transport pseudospectral with 2/3 dealiasing, k = 0 untouched.
///
/// Throws CflViolated if dt > 0.2 dtheta / max|K (W*q)'| and BlowUp on NaN or max q > 1e6.
Density mv_step(const Density& q, const Potential& w, double k, double dt);

/// L2 norm of the right-hand side (no dealiasing).
double stationarity_residual(const Density& q, const Potential& w, double k);

struct RecordPolicy {
  double first = 1e-3;        // first time after t = 0
  double ratio = 1.05;        // geometric growth of record times
  double max_interval = 0.05; // cap on the spacing
  std::vector<Index> modes;   // tracked |q^(k)|; empty = k_* only
  bool w2 = true;
  int snapshots = 0;          // evenly spaced density snapshots (plus the final state)
};

struct FlowTrace {
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> w2;
  std::vector<double> free_energy;
  std::vector<double> mass_defect;
  std::vector<Index> modes;
  std::vector<std::vector<double>> mode_amplitude;  // [mode][record]
  std::vector<std::pair<double, Density>> snapshots;
  std::optional<Density> terminal;
  bool stopped_early = false;  // stationarity residual fell below 1e-12
  double final_residual = 0.0;
  long steps = 0;

  std::size_t size() const { return times.size(); }
};

/// Integrates to `t_end` with fixed dt, recording at the policy cadence.
FlowTrace integrate(const Density& q0, const Potential& w, double k, double t_end, double dt,
                    const RecordPolicy& policy = {});

void write_flow_trace_csv(const FlowTrace& trace, const std::string& path);

/// d/dt c(k) = -2 pi^2 k (k - K) c(k) + 2 pi^2 k K sum_{j=1}^{k-1} c(j) c(k-j),  k = 1..M.
///
/// c holds q^(0..M); entry 0 is ignored. Mode k depends only on modes <= k.
template <typename Scalar>
VecT<Scalar> loggas_rhs(const VecT<Scalar>& c, Scalar k_coupling) {
  // the bracket cancels to zero on stationary states, so double input is accumulated in long double
  using Acc = std::conditional_t<std::is_same_v<Scalar, double>, long double, Scalar>;
  const Index m = c.size() - 1;
  VecT<Scalar> out = VecT<Scalar>::Zero(c.size());
  const Acc two_pi_sq = Acc(2) * Acc(kPi) * Acc(kPi);
  const Acc kc = static_cast<Acc>(k_coupling);
  for (Index k = 1; k <= m; ++k) {
    Acc conv(0);
    for (Index j = 1; j < k; ++j) conv += static_cast<Acc>(c[j]) * static_cast<Acc>(c[k - j]);
    const Acc kk = static_cast<Acc>(k);
    out[k] = static_cast<Scalar>(two_pi_sq * kk * (kc * conv - (kk - kc) * static_cast<Acc>(c[k])));
  }
  return out;
}

/// Classical RK4 on the log-gas hierarchy.
template <typename Scalar>
VecT<Scalar> loggas_rk4(VecT<Scalar> c, Scalar k_coupling, Scalar t_end, Scalar dt) {
  const long steps = static_cast<long>(std::ceil(static_cast<double>(t_end / dt) - 1e-9));
  const Scalar h = t_end / static_cast<Scalar>(steps);
  for (long s = 0; s < steps; ++s) {
    const VecT<Scalar> k1 = loggas_rhs<Scalar>(c, k_coupling);
    const VecT<Scalar> k2 = loggas_rhs<Scalar>(c + (h / 2) * k1, k_coupling);
    const VecT<Scalar> k3 = loggas_rhs<Scalar>(c + (h / 2) * k2, k_coupling);
    const VecT<Scalar> k4 = loggas_rhs<Scalar>(c + h * k3, k_coupling);
    c += (h / 6) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
  }
  return c;
}

enum class RateModel { Exponential, Algebraic };
const char* rate_model_name(RateModel m);

struct RateFit {
  double t_lo = 0.0;
  double t_hi = 0.0;
  RateModel model = RateModel::Exponential;
  /// Exponential: obs ~ e^{-rate t}. Algebraic: obs ~ t^{exponent}.
  double rate = 0.0;
  double exponent = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least squares of log(obs) on t or log t.
///
/// Without a window, the fit uses the last contiguous stretch where every 20-point
/// rolling fit has R^2 > 0.999, ignoring values below 1e-9 of the maximum.
/// Throws DegenerateWindow for fewer than 20 usable points.
RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& obs, RateModel model,
                 std::optional<std::pair<double, double>> window = {});

enum class Observable { L2, W2, Mode };
RateFit fit_rate(const FlowTrace& trace, Observable obs, RateModel model, Index mode = 0,
                 std::optional<std::pair<double, double>> window = {});

}  // namespace circlept
