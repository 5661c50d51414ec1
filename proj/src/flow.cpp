#include "circlept/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "circlept/critical.hpp"

namespace circlept {

namespace {

constexpr double kBlowUp = 1e6;

// phi_1(z) = (e^z - 1)/z, phi_2(z) = (e^z - 1 - z)/z^2
double phi1(double z) { return std::abs(z) < 1e-8 ? 1.0 + 0.5 * z : std::expm1(z) / z; }

double phi2(double z) {
  if (std::abs(z) < 1e-2) {
    double term = 0.5;
    double sum = 0.5;
    for (int j = 3; j < 10; ++j) {
      term *= z / static_cast<double>(j);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

class Stepper {
 public:
  Stepper(const Potential& w, double k, double dt, Index m) : k_(k), dt_(dt), m_(m) {
    const Index half = m / 2;
    e_.resize(half + 1);
    p1_.resize(half + 1);
    p2_.resize(half + 1);
    wk_ = Vec::Zero(half + 1);
    for (Index j = 0; j <= half; ++j) {
      const double z = -2.0 * kPi * kPi * static_cast<double>(j * j) * dt;
      e_[j] = std::exp(z);
      p1_[j] = phi1(z);
      p2_[j] = phi2(z);
      if (j >= 1 && j <= w.truncation()) wk_[j] = w.coeff(j);
    }
  }

  // -K i 2 pi k FFT[q (W*q)'] with 2/3 dealiasing
  CVec transport(const CVec& qh, double* speed) const {
    CVec a = qh;
    dealias(a, m_);
    CVec gh(a.size());
    for (Index j = 0; j < a.size(); ++j) gh[j] = Complex(0.0, kTwoPi * static_cast<double>(j) * wk_[j]) * a[j];
    gh[m_ / 2] = Complex(0.0, 0.0);
    const Vec q = to_grid(a, m_);
    const Vec g = to_grid(gh, m_);
    if (speed) *speed = std::abs(k_) * g.cwiseAbs().maxCoeff();
    CVec fh = to_fourier(q.cwiseProduct(g));
    dealias(fh, m_);
    CVec out(fh.size());
    for (Index j = 0; j < fh.size(); ++j) out[j] = Complex(0.0, -k_ * kTwoPi * static_cast<double>(j)) * fh[j];
    out[0] = Complex(0.0, 0.0);
    out[m_ / 2] = Complex(0.0, 0.0);
    return out;
  }

  CVec step(const CVec& qh) const {
    double speed = 0.0;
    const CVec n0 = transport(qh, &speed);
    const double dtheta = 1.0 / static_cast<double>(m_);
    if (speed > 0.0 && dt_ > 0.2 * dtheta / speed)
      throw Error(ErrorCode::CflViolated, "dt=" + std::to_string(dt_) + " exceeds 0.2 dtheta / max|K (W*q)'| = " +
                                              std::to_string(0.2 * dtheta / speed));
    CVec a(qh.size());
    for (Index j = 0; j < qh.size(); ++j) a[j] = e_[j] * qh[j] + dt_ * p1_[j] * n0[j];
    const CVec n1 = transport(a, nullptr);
    CVec out(qh.size());
    for (Index j = 0; j < qh.size(); ++j) out[j] = a[j] + dt_ * p2_[j] * (n1[j] - n0[j]);
    out[0] = qh[0];
    return out;
  }

 private:
  double k_;
  double dt_;
  Index m_;
  Vec e_, p1_, p2_, wk_;
};

Vec checked_grid(const CVec& qh, Index m) {
  Vec v = to_grid(qh, m);
  if (!v.allFinite()) throw Error(ErrorCode::BlowUp, "NaN in the flow state");
  if (v.maxCoeff() > kBlowUp) throw Error(ErrorCode::BlowUp, "max q exceeds 1e6");
  return v;
}

Index dominant_mode(const Potential& w) {
  try {
    return k_sharp(w).mode;
  } catch (const Error&) {
    return 1;
  }
}

double r_squared(const std::vector<double>& x, const std::vector<double>& y, std::size_t lo, std::size_t hi,
                 double* slope) {
  const double n = static_cast<double>(hi - lo);
  double sx = 0, sy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double b = sxx > 0 ? sxy / sxx : 0.0;
  if (slope) *slope = b;
  if (syy <= 0.0) return 1.0;
  const double ss_res = std::max(0.0, syy - b * sxy);
  return std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
}

}  // namespace

Density mv_step(const Density& q, const Potential& w, double k, double dt) {
  const Index m = q.grid_size();
  const Stepper s(w, k, dt, m);
  CVec next = s.step(q.fourier());
  next[0] = Complex(1.0, 0.0);
  return density_from_grid(checked_grid(next, m));
}

double stationarity_residual(const Density& q, const Potential& w, double k) {
  const Index m = q.grid_size();
  const CVec& qh = q.fourier();
  CVec gh(qh.size());
  for (Index j = 0; j < qh.size(); ++j) {
    const double wj = (j >= 1 && j <= w.truncation()) ? w.coeff(j) : 0.0;
    gh[j] = Complex(0.0, kTwoPi * static_cast<double>(j) * wj) * qh[j];
  }
  gh[m / 2] = Complex(0.0, 0.0);
  const CVec fh = to_fourier(q.values().cwiseProduct(to_grid(gh, m)));
  double sum = 0.0;
  for (Index j = 1; j <= m / 2; ++j) {
    const double kk = static_cast<double>(j);
    Complex rhs = -2.0 * kPi * kPi * kk * kk * qh[j];
    if (j < m / 2) rhs += Complex(0.0, -k * kTwoPi * kk) * fh[j];
    sum += parseval_weight(j, m) * std::norm(rhs);
  }
  return std::sqrt(sum);
}

FlowTrace integrate(const Density& q0, const Potential& w, double k, double t_end, double dt,
                    const RecordPolicy& policy) {
  if (!(t_end > 0.0) || !(dt > 0.0)) throw Error(ErrorCode::BadParams, "integrate needs T > 0 and dt > 0");
  const Index m = q0.grid_size();
  const Stepper stepper(w, k, dt, m);
  const Density uniform = Density::uniform(m);

  FlowTrace tr;
  tr.modes = policy.modes.empty() ? std::vector<Index>{dominant_mode(w)} : policy.modes;
  tr.mode_amplitude.assign(tr.modes.size(), {});

  CVec qh = q0.fourier();
  auto record = [&](double t, const Density& d, const Vec& raw) {
    tr.times.push_back(t);
    tr.l2.push_back(distance(d, uniform, Metric::L2));
    tr.w2.push_back(policy.w2 ? distance(d, uniform, Metric::W2Circle) : 0.0);
    tr.free_energy.push_back(free_energy(d, w, k));
    tr.mass_defect.push_back(std::abs(qh[0].real() - 1.0) + std::abs(raw.mean() - 1.0));
    for (std::size_t i = 0; i < tr.modes.size(); ++i) tr.mode_amplitude[i].push_back(std::abs(d.coeff(tr.modes[i])));
  };
  record(0.0, q0, q0.values());

  const long steps = std::max<long>(1, std::lround(t_end / dt));
  const long snap_every = policy.snapshots > 0 ? std::max<long>(1, steps / policy.snapshots) : 0;
  double next_record = policy.first;
  for (long i = 1; i <= steps; ++i) {
    qh = stepper.step(qh);
    ++tr.steps;
    const double t = static_cast<double>(i) * dt;
    const bool due = t >= next_record - 1e-12 || i == steps;
    const bool check_stationary = i % 200 == 0;
    const bool snap = snap_every > 0 && i % snap_every == 0;
    if (!(due || check_stationary || snap)) continue;

    const Vec raw = checked_grid(qh, m);
    const Density d = density_from_grid(raw);
    bool stop = false;
    if (check_stationary || i == steps) {
      tr.final_residual = stationarity_residual(d, w, k);
      stop = tr.final_residual < 1e-12;
    }
    if (snap) tr.snapshots.emplace_back(t, d);
    if (due || stop) {
      record(t, d, raw);
      next_record = std::max(t + dt, std::min(t * policy.ratio, t + policy.max_interval));
    }
    if (stop || i == steps) {
      tr.stopped_early = stop && i < steps;
      tr.terminal = d;
      break;
    }
  }
  return tr;
}

void write_flow_trace_csv(const FlowTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path);
  out.precision(17);
  out << "t,L2_dist,W2_dist";
  for (Index m : trace.modes) out << ",abs_q_" << m;
  out << ",free_energy,mass_defect\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << trace.times[i] << ',' << trace.l2[i] << ',' << trace.w2[i];
    for (const auto& series : trace.mode_amplitude) out << ',' << series[i];
    out << ',' << trace.free_energy[i] << ',' << trace.mass_defect[i] << '\n';
  }
}

const char* rate_model_name(RateModel m) { return m == RateModel::Exponential ? "exponential" : "algebraic"; }

RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& obs, RateModel model,
                 std::optional<std::pair<double, double>> window) {
  constexpr std::size_t kMinPoints = 20;
  if (times.size() != obs.size()) throw Error(ErrorCode::BadParams, "times and observable differ in length");
  double peak = 0.0;
  for (double v : obs)
    if (std::isfinite(v)) peak = std::max(peak, v);
  const double floor = 1e-9 * peak;

  std::vector<double> x, y, t;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(obs[i] > floor) || !std::isfinite(obs[i])) continue;
    if (model == RateModel::Algebraic && !(times[i] > 0.0)) continue;
    if (window && (times[i] < window->first || times[i] > window->second)) continue;
    t.push_back(times[i]);
    x.push_back(model == RateModel::Exponential ? times[i] : std::log(times[i]));
    y.push_back(std::log(obs[i]));
  }
  if (x.size() < kMinPoints)
    throw Error(ErrorCode::DegenerateWindow, std::to_string(x.size()) + " usable points, need 20");

  std::size_t lo = 0;
  std::size_t hi = x.size();
  if (!window) {
    const std::size_t starts = x.size() - kMinPoints + 1;
    std::vector<bool> good(starts);
    for (std::size_t s = 0; s < starts; ++s) good[s] = r_squared(x, y, s, s + kMinPoints, nullptr) > 0.999;
    std::size_t last = starts;
    for (std::size_t s = starts; s-- > 0;)
      if (good[s]) {
        last = s;
        break;
      }
    if (last == starts) throw Error(ErrorCode::DegenerateWindow, "no log-linear stretch of 20 points");
    std::size_t first = last;
    while (first > 0 && good[first - 1]) --first;
    lo = first;
    hi = last + kMinPoints;
  }

  RateFit fit;
  fit.model = model;
  double slope = 0.0;
  fit.r2 = r_squared(x, y, lo, hi, &slope);
  fit.t_lo = t[lo];
  fit.t_hi = t[hi - 1];
  fit.points = static_cast<int>(hi - lo);
  if (model == RateModel::Exponential)
    fit.rate = -slope;
  else
    fit.exponent = slope;
  return fit;
}

RateFit fit_rate(const FlowTrace& trace, Observable obs, RateModel model, Index mode,
                 std::optional<std::pair<double, double>> window) {
  switch (obs) {
    case Observable::L2: return fit_rate(trace.times, trace.l2, model, window);
    case Observable::W2: return fit_rate(trace.times, trace.w2, model, window);
    case Observable::Mode:
      for (std::size_t i = 0; i < trace.modes.size(); ++i)
        if (trace.modes[i] == mode) return fit_rate(trace.times, trace.mode_amplitude[i], model, window);
      throw Error(ErrorCode::BadParams, "mode " + std::to_string(mode) + " was not tracked");
  }
  return {};
}

}  // namespace circlept
