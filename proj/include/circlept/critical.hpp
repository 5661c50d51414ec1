#pragma once

// Critical points of F_K: the self-consistency map, multistart minimization,
// critical-coupling scans and the closed-form stability quantities.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "circlept/density.hpp"
#include "circlept/potential.hpp"

namespace circlept {

/// T(q) = e^{2K (W*q)} / Z. Throws ExpOverflow if 2K max|W*q| > 700.
Density km_map(const Density& q, const Potential& w, double k);

struct SolveOptions {
  double damping = 0.5;
  double tol = 1e-11;
  int max_iter = 20000;
  /// Pulay/Anderson mixing on top of the damped step, guarded by F descent.
  bool anderson = false;
  int anderson_depth = 5;
};

struct SolveReport {
  Density density;
  double residual = 0.0;  // sup |q - T(q)|
  double free_energy = 0.0;
  int iterations = 0;
  double damping_used = 0.0;
  std::string seed_id;
  bool converged = false;
};

/// q <- (1-a) q + a T(q) until sup|q - T(q)| <= tol.
///
/// If the residual is not below its value 50 iterations earlier the damping is halved,
/// at most 6 times. Non-convergence is reported through `converged`, not thrown.
SolveReport solve_fixed_point(const Potential& w, double k, const Density& q0, const SolveOptions& opt = {},
                              const std::string& seed_id = "q0");

struct Seed {
  std::string id;
  Density density;
};

/// Cosine, extremal-family, bump and two-mode seeds on the 1/(n+1) lattice (8 in total),
/// optionally duplicated at the shift 1/(4(n+1)).
std::vector<Seed> standard_seeds(int n, Index m, bool shifted = false);

/// |q^(k)|.
inline double order_parameter(const Density& q, Index mode) { return std::abs(q.coeff(mode)); }

struct MinimizerResult {
  SolveReport best;
  std::vector<SolveReport> reports;
  double best_gap = 0.0;  // F_K(q_u) - min F over converged critical points
  double order_parameter = 0.0;
  int n_converged = 0;
  /// Two converged states with different order parameters have F within 1e-9.
  bool ambiguous = false;
};

/// Multistart search; q_u always competes. Ties within 1e-11 go to the smaller order
/// parameter. Throws AllSeedsFailed if no seed converges.
MinimizerResult find_minimizer(const Potential& w, double k, const std::vector<Seed>& seeds,
                               const SolveOptions& opt = {}, int threads = 0);

enum class Continuity { Continuous, Discontinuous, Undetermined };
const char* continuity_name(Continuity c);

struct ScanOptions {
  std::optional<double> lo;  // default K_* (1 - 1e-6), certified subcritical
  std::optional<double> hi;  // default 1.02 K_#
  double tol_k = 5e-3;
  /// Relative bracket width (of K_#) reached before the continuity test; a fold can sit
  /// within ~1e-3 K_# of K_c, so the continuation must start inside it.
  double classify_tol = 2e-5;
  double tol_f = 1e-10;
  Index grid_size = 512;
  bool shifted_seeds = false;
  SolveOptions solve = {0.5, 1e-11, 40000, true, 5};
  int threads = 0;
  double continuous_below = 0.02;
  double discontinuous_above = 0.05;
};

struct ScanRow {
  double k = 0.0;
  double best_gap = 0.0;
  double order_parameter = 0.0;
  int n_seeds_converged = 0;
};

struct PhaseDiagram {
  std::vector<ScanRow> rows;  // sorted by K
  double k_c = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  double k_sharp = 0.0;
  double k_star = 0.0;
  Index mode = 0;
  Continuity continuity = Continuity::Undetermined;
  /// Order parameter of the supercritical branch continued down to bracket_lo.
  double jump_estimate = 0.0;
  /// Order parameter of the minimizer at bracket_hi.
  double order_at_hi = 0.0;
  int monotonicity_violations = 0;
  int ambiguous_points = 0;
  double width() const { return bracket_hi - bracket_lo; }
};

/// Bisects the predicate best_gap(K) > tol_F. Throws BracketNotStraddling.
PhaseDiagram scan_kc(const Potential& w, const ScanOptions& opt = {});

void write_phase_diagram_csv(const PhaseDiagram& d, const std::string& path);
std::string phase_diagram_json(const PhaseDiagram& d);

/// p(c) = (1/4)(1 - w2) c^2 - c/8 + 1/32, w2 = 2W^(2) with 2W^(1) = 1.
template <typename Scalar>
Scalar landau_p(Scalar w2, Scalar c) {
  return (Scalar(1) - w2) * c * c / Scalar(4) - c / Scalar(8) + Scalar(1) / Scalar(32);
}

template <typename Scalar>
struct LandauMin {
  Scalar c_star;
  Scalar p_star;
  bool bounded;  // false for w2 >= 1: p is unbounded below
};

template <typename Scalar>
LandauMin<Scalar> landau_min(Scalar w2) {
  if (!(w2 < Scalar(1)))
    return {std::numeric_limits<Scalar>::infinity(), -std::numeric_limits<Scalar>::infinity(), false};
  const Scalar one_minus = Scalar(1) - w2;
  return {Scalar(1) / (Scalar(4) * one_minus), (Scalar(1) - Scalar(2) * w2) / (Scalar(64) * one_minus), true};
}

struct SpectralGap {
  double value = 0.0;
  Index mode = 0;
  bool supercritical = false;  // value <= 0
  bool certified = false;      // modes beyond the truncation cannot go lower
};

/// min over k in (n+1)N of (k^2/2)(1 - 2K W^(k)).
SpectralGap lambda_star(const Potential& w, double k, int n = 0);

/// min over k with W^(k) > 0 of (n+1) / (2 k W^(k)). Throws PeriodicityMismatch.
double k_star(const Potential& w, int n);

enum class Prediction { Continuous, Discontinuous, None };
const char* prediction_name(Prediction p);

struct TransitionPrediction {
  Prediction kind = Prediction::None;
  std::string reason;
};

/// Continuous when the decay condition holds; discontinuous when the normalized
/// coefficients satisfy the bimodal criterion (2W^(2(n+1)) > 1/2, all <= 1).
TransitionPrediction predict_transition(const Potential& w);

}  // namespace circlept
