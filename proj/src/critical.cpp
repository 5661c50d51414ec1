#include "circlept/critical.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include <Eigen/QR>
#include <json.hpp>

#include "circlept/parallel.hpp"
#include "circlept/spectral.hpp"

namespace circlept {

namespace {

constexpr double kMaxExponent = 700.0;
constexpr int kOscillationWindow = 50;
constexpr int kAndersonRestart = 50;
constexpr int kMaxHalvings = 6;
constexpr double kTieTolerance = 1e-11;

struct AndersonHistory {
  std::deque<Vec> dx;
  std::deque<Vec> df;
  Vec last_x;
  Vec last_f;
  bool has_last = false;

  void clear() {
    dx.clear();
    df.clear();
    has_last = false;
  }

  void push(const Vec& x, const Vec& f, int depth) {
    if (has_last) {
      dx.push_back(x - last_x);
      df.push_back(f - last_f);
      if (static_cast<int>(dx.size()) > depth) {
        dx.pop_front();
        df.pop_front();
      }
    }
    last_x = x;
    last_f = f;
    has_last = true;
  }

  // x + a f - (dX + a dF) gamma with gamma = argmin |f - dF gamma|
  std::optional<Vec> extrapolate(const Vec& x, const Vec& f, double a) const {
    if (dx.empty()) return std::nullopt;
    const Index m = static_cast<Index>(dx.size());
    Eigen::MatrixXd fmat(x.size(), m);
    Eigen::MatrixXd xmat(x.size(), m);
    for (Index i = 0; i < m; ++i) {
      fmat.col(i) = df[static_cast<std::size_t>(i)];
      xmat.col(i) = dx[static_cast<std::size_t>(i)];
    }
    const Vec gamma = fmat.colPivHouseholderQr().solve(f);
    if (!gamma.allFinite()) return std::nullopt;
    return Vec(x + a * f - (xmat + a * fmat) * gamma);
  }
};

}  // namespace

Density km_map(const Density& q, const Potential& w, double k) {
  Vec u = 2.0 * k * convolve(w, q);
  const double peak = u.cwiseAbs().maxCoeff();
  if (peak > kMaxExponent)
    throw Error(ErrorCode::ExpOverflow, "2K max|W*q| = " + std::to_string(peak) + " exceeds 700");
  const double top = u.maxCoeff();
  return density_from_grid((u.array() - top).exp().matrix());
}

SolveReport solve_fixed_point(const Potential& w, double k, const Density& q0, const SolveOptions& opt,
                              const std::string& seed_id) {
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw Error(ErrorCode::BadParams, "damping must be in (0, 1]");
  if (!(opt.tol >= 1e-13)) throw Error(ErrorCode::BadParams, "tol must be >= 1e-13");

  Density q = q0;
  double alpha = opt.damping;
  int halvings = 0;
  int since_halving = 0;
  std::vector<double> history;
  AndersonHistory mix;
  double f_current = opt.anderson ? free_energy(q, w, k) : 0.0;

  for (int it = 0;; ++it) {
    const Density tq = km_map(q, w, k);
    const Vec r = tq.values() - q.values();
    const double residual = r.cwiseAbs().maxCoeff();
    if (residual <= opt.tol || it >= opt.max_iter) {
      return {q, residual, free_energy(q, w, k), it, alpha, seed_id, residual <= opt.tol};
    }

    history.push_back(residual);
    ++since_halving;
    if (!opt.anderson && since_halving > kOscillationWindow && halvings < kMaxHalvings &&
        residual >= history[history.size() - 1 - kOscillationWindow]) {
      alpha *= 0.5;
      ++halvings;
      since_halving = 0;
    }

    std::optional<Density> next;
    if (opt.anderson) {
      // periodic restart; stale secant pairs stall the energy-guarded iteration near q_u
      if (it % kAndersonRestart == 0) mix.clear();
      mix.push(q.values(), r, opt.anderson_depth);
      if (auto x = mix.extrapolate(q.values(), r, alpha); x && x->minCoeff() > 0.0 && x->allFinite()) {
        Density candidate = density_from_grid(*x);
        const double f_candidate = free_energy(candidate, w, k);
        if (f_candidate <= f_current + 1e-14) {
          next = std::move(candidate);
          f_current = f_candidate;
        } else {
          mix.clear();
        }
      }
    }
    if (!next) {
      next = density_from_grid((1.0 - alpha) * q.values() + alpha * tq.values());
      if (opt.anderson) f_current = free_energy(*next, w, k);
    }
    q = std::move(*next);
  }
}

std::vector<Seed> standard_seeds(int n, Index m, bool shifted) {
  const double p = static_cast<double>(n + 1);
  std::vector<Seed> out;
  const int copies = shifted ? 2 : 1;
  for (int copy = 0; copy < copies; ++copy) {
    const double shift = copy == 0 ? 0.0 : 1.0 / (4.0 * p);
    const std::string tag = copy == 0 ? "" : "@shift";
    for (double a : {0.2, 0.6, 0.95}) {
      std::ostringstream id;
      id << "cos" << a << tag;
      out.push_back({id.str(), density_from_function(
                                   [=](double t) { return 1.0 + a * std::cos(kTwoPi * p * (t - shift)); }, m)});
    }
    for (double c : {0.3, 0.7, 0.95}) {
      std::ostringstream id;
      id << "extremal" << c << tag;
      out.push_back({id.str(), ExtremalFamily{n, c, shift}.sample(m)});
    }
    out.push_back({"bump0.99" + tag, ExtremalFamily{n, 0.99, shift}.sample(m)});
    out.push_back({"two_mode" + tag, density_from_function(
                                         [=](double t) {
                                           const double x = kTwoPi * p * (t - shift);
                                           return 1.0 + 0.5 * std::cos(x) + 0.25 * std::cos(2.0 * x);
                                         },
                                         m)});
  }
  return out;
}

MinimizerResult find_minimizer(const Potential& w, double k, const std::vector<Seed>& seeds, const SolveOptions& opt,
                               int threads) {
  const Index mode = k_sharp(w).mode;
  std::vector<std::optional<SolveReport>> slots(seeds.size());
  parallel_for(static_cast<Index>(seeds.size()), threads, [&](Index i) {
    const Seed& s = seeds[static_cast<std::size_t>(i)];
    slots[static_cast<std::size_t>(i)] = solve_fixed_point(w, k, s.density, opt, s.id);
  });

  std::vector<SolveReport> reports;
  for (auto& s : slots) reports.push_back(std::move(*s));

  const Index m = seeds.empty() ? 512 : seeds.front().density.grid_size();
  SolveReport best{Density::uniform(m), 0.0, 0.0, 0, opt.damping, "uniform", true};
  double best_order = 0.0;
  int converged = 0;
  for (const auto& r : reports) {
    if (!r.converged) continue;
    ++converged;
    const double order = order_parameter(r.density, mode);
    const bool lower = r.free_energy < best.free_energy - kTieTolerance;
    const bool tie = std::abs(r.free_energy - best.free_energy) <= kTieTolerance && order < best_order;
    if (lower || tie) {
      best = r;
      best_order = order;
    }
  }
  if (!seeds.empty() && converged == 0)
    throw Error(ErrorCode::AllSeedsFailed, "no seed converged at K=" + std::to_string(k));

  bool ambiguous = false;
  for (const auto& r : reports) {
    if (!r.converged) continue;
    if (std::abs(r.free_energy - best.free_energy) <= 1e-9 &&
        std::abs(order_parameter(r.density, mode) - best_order) > 1e-3)
      ambiguous = true;
  }
  if (best_order > 1e-3 && std::abs(best.free_energy) <= 1e-9) ambiguous = true;

  const double gap = std::max(0.0, -best.free_energy);
  return {std::move(best), std::move(reports), gap, best_order, converged, ambiguous};
}

const char* continuity_name(Continuity c) {
  switch (c) {
    case Continuity::Continuous: return "continuous";
    case Continuity::Discontinuous: return "discontinuous";
    case Continuity::Undetermined: return "undetermined";
  }
  return "unknown";
}

PhaseDiagram scan_kc(const Potential& w, const ScanOptions& opt) {
  const int n = w.periodicity();
  const KSharp ks = k_sharp(w);
  PhaseDiagram d;
  d.k_sharp = ks.value;
  d.k_star = k_star(w, n);
  d.mode = ks.mode;

  double lo = opt.lo.value_or(d.k_star * (1.0 - 1e-6));
  double hi = opt.hi.value_or(1.02 * ks.value);
  if (!(lo < hi)) throw Error(ErrorCode::BadParams, "scan bracket needs lo < hi");

  const std::vector<Seed> seeds = standard_seeds(n, opt.grid_size, opt.shifted_seeds);
  auto evaluate = [&](double k, const Density* warm) {
    std::vector<Seed> set = seeds;
    if (warm) set.push_back({"warm", *warm});
    MinimizerResult r = find_minimizer(w, k, set, opt.solve, opt.threads);
    d.rows.push_back({k, r.best_gap, r.order_parameter, r.n_converged});
    if (r.ambiguous) ++d.ambiguous_points;
    return r;
  };

  const MinimizerResult at_lo = evaluate(lo, nullptr);
  if (at_lo.best_gap > opt.tol_f)
    throw Error(ErrorCode::BracketNotStraddling,
                "K=" + std::to_string(lo) + " is already supercritical; lower the bracket (--lo)");
  MinimizerResult at_hi = evaluate(hi, nullptr);
  if (at_hi.best_gap <= opt.tol_f)
    throw Error(ErrorCode::BracketNotStraddling,
                "no nonuniform minimizer at K=" + std::to_string(hi) + "; raise the bracket (--hi)");

  Density hi_state = at_hi.best.density;
  d.order_at_hi = at_hi.order_parameter;
  const double width = std::min(opt.tol_k, opt.classify_tol * d.k_sharp);
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    MinimizerResult r = evaluate(mid, &hi_state);
    if (r.best_gap > opt.tol_f) {
      hi = mid;
      hi_state = r.best.density;
      d.order_at_hi = r.order_parameter;
    } else {
      lo = mid;
    }
  }
  d.bracket_lo = lo;
  d.bracket_hi = hi;
  d.k_c = 0.5 * (lo + hi);

  // Follow the supercritical branch down to the subcritical end of the bracket. The gap
  // predicate cannot see gaps below tol_F, so the end point is also kept under K_# >= K_c.
  const double target = std::min(lo, d.k_sharp * (1.0 - 1e-6));
  Density state = hi_state;
  constexpr int kSteps = 4;
  for (int s = 1; s <= kSteps; ++s) {
    const double k = hi + (target - hi) * static_cast<double>(s) / kSteps;
    state = solve_fixed_point(w, k, state, opt.solve, "continuation").density;
  }
  d.jump_estimate = order_parameter(state, d.mode);
  if (d.jump_estimate < opt.continuous_below)
    d.continuity = Continuity::Continuous;
  else if (d.jump_estimate > opt.discontinuous_above)
    d.continuity = Continuity::Discontinuous;
  else
    d.continuity = Continuity::Undetermined;

  std::sort(d.rows.begin(), d.rows.end(), [](const ScanRow& a, const ScanRow& b) { return a.k < b.k; });
  for (std::size_t i = 1; i < d.rows.size(); ++i)
    if (d.rows[i].best_gap < d.rows[i - 1].best_gap - 1e-10) ++d.monotonicity_violations;
  return d;
}

void write_phase_diagram_csv(const PhaseDiagram& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path);
  out.precision(17);
  out << "K,best_gap,order_parameter,n_seeds_converged\n";
  for (const auto& r : d.rows) out << r.k << ',' << r.best_gap << ',' << r.order_parameter << ',' << r.n_seeds_converged << '\n';
}

std::string phase_diagram_json(const PhaseDiagram& d) {
  nlohmann::json j;
  j["K_c"] = d.k_c;
  j["K_c_bracket"] = {d.bracket_lo, d.bracket_hi};
  j["K_sharp"] = d.k_sharp;
  j["K_star"] = d.k_star;
  j["mode"] = d.mode;
  j["continuity"] = continuity_name(d.continuity);
  j["jump"] = d.jump_estimate;
  j["order_at_hi"] = d.order_at_hi;
  j["monotonicity_violations"] = d.monotonicity_violations;
  j["ambiguous_points"] = d.ambiguous_points;
  return j.dump(2);
}

SpectralGap lambda_star(const Potential& w, double k, int n) {
  const Index p = n + 1;
  SpectralGap g;
  g.value = std::numeric_limits<double>::infinity();
  for (Index m = p; m <= w.truncation(); m += p) {
    const double km = static_cast<double>(m);
    const double v = 0.5 * km * km * (1.0 - 2.0 * k * w.coeff(m));
    if (v < g.value) {
      g.value = v;
      g.mode = m;
    }
  }
  // beyond the table (k^2/2)(1 - 2K W^(k)) >= k^2/2 - K env k, increasing past K env
  const double env = w.decay_envelope(w.truncation());
  const double next = static_cast<double>(w.truncation() + 1);
  g.certified = next >= k * env && 0.5 * next * next - k * env * next >= g.value;
  g.supercritical = g.value <= 0.0;
  return g;
}

double k_star(const Potential& w, int n) {
  const Index p = n + 1;
  double best = std::numeric_limits<double>::infinity();
  for (Index m = 1; m <= w.truncation(); ++m) {
    const double c = w.coeff(m);
    if (c == 0.0) continue;
    if (m % p != 0)
      throw Error(ErrorCode::PeriodicityMismatch, "mode " + std::to_string(m) + " is not a multiple of " + std::to_string(p));
    if (c > 0.0) best = std::min(best, static_cast<double>(p) / (2.0 * static_cast<double>(m) * c));
  }
  const double env = w.decay_envelope(w.truncation());
  if (env > 0.0) best = std::min(best, static_cast<double>(p) / (2.0 * env));
  return best;
}

const char* prediction_name(Prediction p) {
  switch (p) {
    case Prediction::Continuous: return "continuous";
    case Prediction::Discontinuous: return "discontinuous";
    case Prediction::None: return "none";
  }
  return "unknown";
}

TransitionPrediction predict_transition(const Potential& w) {
  if (w.model() == Model::LogGas) return {Prediction::None, "log-gas: no minimizer exists for K > 1"};
  const int n = w.periodicity();
  const Index p = n + 1;
  if (!(w.coeff(p) > 0.0)) return {Prediction::None, "leading lattice mode is not attractive"};

  const DecayReport decay = check_decay(w, n);
  if (decay.passed && decay.tail_certified) return {Prediction::Continuous, "decay condition holds"};

  const Normalized norm = normalize(w, n);
  const double w2 = 2.0 * norm.potential.coeff(2 * p);
  double top = 0.0;
  for (Index m = p; m <= norm.potential.truncation(); m += p) top = std::max(top, 2.0 * norm.potential.coeff(m));
  const Index trunc = norm.potential.truncation();
  top = std::max(top, 2.0 * norm.potential.decay_envelope(trunc) / static_cast<double>(trunc + 1));
  std::ostringstream why;
  why << "decay fails at k=" << (decay.first_violation ? *decay.first_violation : Index(0)) << "; normalized 2W(2(n+1))=" << w2;
  if (w2 > 0.5 && top <= 1.0 + 1e-12) return {Prediction::Discontinuous, why.str() + " > 1/2 with all modes <= 1"};
  return {Prediction::None, why.str()};
}

}  // namespace circlept
