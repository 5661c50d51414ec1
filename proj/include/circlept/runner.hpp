#pragma once

// Command layer behind the circlept CLI: configuration, dispatch and result files.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "circlept/potential.hpp"

namespace circlept {

struct RunConfig {
  std::string command = "thresholds";  // thresholds|scan|minimize|flow|particles|verify|report
  ModelParams model;
  Index truncation = 0;  // 0: command default
  Index grid = 512;

  /// Coupling: a number, or "subcritical" (K_#/2), "critical" (K_#), "supercritical" (1.2 K_#).
  std::string coupling;
  double dt = 0.0;     // 0: command default
  double t_end = 0.0;  // 0: command default
  double tol = 1e-11;  // fixed-point residual
  double tol_k = 5e-3;
  double tol_f = 1e-10;
  std::optional<double> lo;
  std::optional<double> hi;
  bool no_assert = false;

  // flow
  std::string fit = "none";  // none|exponential|algebraic
  double epsilon = 1e-2;
  Index perturb_mode = 0;  // 0: the spectral-gap mode

  // particles
  Index particles = 5000;
  int replicates = 16;
  std::string drift = "fourier_truncated";
  int trajectory_records = 0;

  // verify
  std::string suite = "inequality";  // inequality|lebedev_milin|coercivity|all
  std::vector<int> ns{0, 1, 2};
  int samples = 500;

  std::string input;    // report: run directory
  std::string out_dir;  // empty: <output root>/<command>-<config hash>
  std::uint64_t seed = 1;
  int threads = 0;

  /// Throws Config on invalid settings (non-positive tolerances, M not a power of two, ...).
  void validate() const;
};

std::string config_to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const std::string& text);

enum ExitCode : int { kExitOk = 0, kExitMismatch = 1, kExitConfig = 2, kExitNumerical = 3 };

/// Runs one command, logging lines to `log`. Returns an ExitCode; library errors are mapped to
/// kExitConfig (Config, BadParams, BracketNotStraddling, Io) or kExitNumerical.
int run(const RunConfig& c, std::ostream& log);

/// Directory a config writes into.
std::string run_directory(const RunConfig& c);

}  // namespace circlept
