#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "circlept/types.hpp"

namespace circlept {

enum class Model { DoiOnsager, Transformer, HegselmannKrause, LogGas, Custom };

const char* model_name(Model model);
Model parse_model(const std::string& name);

struct ModelParams {
  Model model = Model::DoiOnsager;
  double beta = 1.0;            // transformer inverse temperature, > 0
  double radius = kPi;          // Hegselmann-Krause confidence radius, in (0, pi]
  std::vector<double> custom;   // custom: W^(1), W^(2), ... (finite list)

  static ModelParams doi_onsager() { return {Model::DoiOnsager, 1.0, kPi, {}}; }
  static ModelParams transformer(double beta) { return {Model::Transformer, beta, kPi, {}}; }
  static ModelParams hegselmann_krause(double r) { return {Model::HegselmannKrause, 1.0, r, {}}; }
  static ModelParams log_gas() { return {Model::LogGas, 1.0, kPi, {}}; }
  static ModelParams custom_coefficients(std::vector<double> c) { return {Model::Custom, 1.0, kPi, std::move(c)}; }

  std::string label() const;
};

/// Even, zero-mean interaction kernel W(theta) = 2 sum_{k>=1} W^(k) cos(2 pi k theta).
///
/// Coefficients are tabulated up to the truncation M_W and are zero beyond it in
/// every spectral computation. The analytic bounds describe the untruncated law:
///   tail_bound(L)     >= sum_{k>L} |W^(k)|
///   decay_envelope(L) >= sup_{k>L} k |W^(k)|
/// A potential produced by `scaled` carries every quantity multiplied by the factor.
class Potential {
 public:
  const ModelParams& params() const { return params_; }
  Model model() const { return params_.model; }
  Index truncation() const { return coeffs_.size() - 1; }
  /// Smallest n >= 0 such that every active mode is a multiple of n+1.
  int periodicity() const { return periodicity_; }
  /// Multiplier applied relative to the catalog law (1 unless rescaled).
  double scale() const { return scale_; }

  double coeff(Index k) const;
  const Vec& coeffs() const { return coeffs_; }

  double tail_bound(Index l) const { return scale_ * tail_(l); }
  double decay_envelope(Index l) const { return scale_ * envelope_(l); }

  bool has_closed_form() const { return static_cast<bool>(value_); }
  /// Closed-form W(theta) with the constant mode removed; throws NoClosedForm.
  double value(double theta) const;
  /// Closed-form W'(theta), set to the symmetric value at kinks; throws NoClosedForm.
  double derivative(double theta) const;
  /// Truncated series 2 sum_{k<=M_W} W^(k) cos(2 pi k theta).
  double series_value(double theta) const;
  /// Truncated series -4 pi sum_{k<=M_W} k W^(k) sin(2 pi k theta).
  double series_derivative(double theta) const;

  std::vector<Index> attractive_modes() const;

  /// Same law multiplied by `factor` (coefficients, bounds and evaluators).
  Potential scaled(double factor) const;

 private:
  friend Potential make_potential(const ModelParams& p, Index truncation);
  Potential() = default;

  ModelParams params_;
  Vec coeffs_;
  int periodicity_ = 0;
  double scale_ = 1.0;
  std::function<double(Index)> tail_;
  std::function<double(Index)> envelope_;
  std::function<double(double)> value_;
  std::function<double(double)> derivative_;
};

/// Builds the catalog potential with coefficients up to `truncation`.
///
/// Laws: Doi-Onsager W^(2l) = (2/pi)/(4l^2-1); transformer W^(l) = I_l(beta)/beta;
/// Hegselmann-Krause W^(l) = 2 (lR - sin lR)/(pi l^3); log-gas W^(k) = 1/(2k);
/// custom uses the supplied list. Requires truncation >= 4(n+1); throws BadParams.
Potential make_potential(const ModelParams& p, Index truncation);

/// Default truncation: M/2 for an M-point grid, and at least the custom list length.
Potential make_potential(const ModelParams& p);

struct KSharp {
  double value = 0.0;  // 1 / (2 max_k W^(k))
  Index mode = 0;      // arg-max mode k_*
  bool certified = false;  // no mode beyond the truncation can beat it
};

/// Linear stability threshold of q_u; throws NoAttractivePart.
KSharp k_sharp(const Potential& w);

struct DecayReport {
  bool passed = false;
  std::optional<Index> first_violation;
  Index checked_up_to = 0;
  bool tail_certified = false;
  /// min_k [(n+1)/k - 2 W^(k)/scale] over checked modes; 0 means equality somewhere.
  double min_margin = 0.0;
  /// Number of checked modes k >= 2(n+1) where the inequality is an equality (1e-12).
  Index equality_modes = 0;
};

/// Checks 2 W^(k) <= (n+1)/k after normalizing 2 W^(n+1) = 1.
///
/// Throws PeriodicityMismatch if an active mode is not a multiple of n+1 and
/// ZeroLeadCoefficient if W^(n+1) <= 0.
DecayReport check_decay(const Potential& w, int n);

struct Normalized {
  Potential potential;
  double scale = 1.0;  // 2 W^(n+1); thresholds map K -> K / scale
};

/// Rescales so that 2 W^(n+1) = 1; throws ZeroLeadCoefficient.
Normalized normalize(const Potential& w, int n);

/// Unique positive root of I_2(b) = I_1(b)/2, bracketed in (2.4, 2.5).
double beta_star();
/// Unique root of R - sin(R)(2 - cos R) in (2.1, 2.2).
double r_star();

// Potential spec file: {"model": ..., "params": {...}, "truncation": ...}
std::string potential_spec_to_json(const ModelParams& p, Index truncation);
Potential potential_from_spec_json(const std::string& text);
void write_coefficients_csv(const Potential& w, const std::string& path);

}  // namespace circlept
