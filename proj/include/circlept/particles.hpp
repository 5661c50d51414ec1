#pragma once

// N-particle system  d theta_i = (K/N) sum_j W'(theta_i - theta_j) dt + dB_i  on the torus.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "circlept/density.hpp"
#include "circlept/potential.hpp"

namespace circlept {

/// Philox4x32-10 counter-based generator.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Standard normal keyed by (seed, step, index). Indices 2j and 2j+1 are the cosine and sine
/// halves of one Box-Muller transform on Philox block j.
double keyed_normal(std::uint64_t seed, std::uint64_t step, std::uint64_t index);
/// Uniform in (0, 1) keyed by (seed, step, index).
double keyed_uniform(std::uint64_t seed, std::uint64_t step, std::uint64_t index);

/// Seed of replicate r in chaos_check.
std::uint64_t replicate_seed(std::uint64_t seed, int r);

/// Maps x into [-1/2, 1/2).
double wrap(double x);

struct ParticleState {
  Vec positions;
  double time = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;  // stream position: noise of the next step uses this counter
};

enum class DriftMode { PairwiseExact, FourierTruncated };
const char* drift_mode_name(DriftMode m);

/// Drift (K/N) sum_j W'(theta_i - theta_j).
///
/// PairwiseExact uses the closed-form W' (throws NoClosedForm) in O(N^2);
/// FourierTruncated uses W'(t) = -4 pi sum_{k<=M_W} k W^(k) sin(2 pi k t) in O(N M_W),
/// with the empirical coefficients reduced over fixed 1024-particle blocks so the result
/// does not depend on the thread count.
Vec drift(const Vec& positions, const Potential& w, double k, DriftMode mode, int threads = 1);

/// Euler-Maruyama: theta <- wrap(theta + drift dt + sqrt(dt) xi). Requires dt <= 1e-3.
ParticleState em_step(const ParticleState& s, const Potential& w, double k, double dt, DriftMode mode,
                      int threads = 1);

/// Same step with caller-provided standard normals (coupled-path refinement studies).
ParticleState em_step_with_noise(const ParticleState& s, const Potential& w, double k, double dt, DriftMode mode,
                                 const Vec& xi, int threads = 1);

/// xi_i for the state's current step.
Vec step_noise(std::uint64_t seed, std::uint64_t step, Index n);

/// (1/N) sum_i e^{-2 pi i k theta_i}; exactly 1 for k = 0.
Complex empirical_fourier(const Vec& positions, Index k);

/// N i.i.d. draws from q by inverse CDF of its piecewise-constant interpolant.
Vec sample_positions(const Density& q, Index n, std::uint64_t seed);

struct ChaosOptions {
  double k = 0.0;
  Index n = 5000;
  double t_end = 5.0;
  int replicates = 16;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  DriftMode mode = DriftMode::FourierTruncated;
  Index pde_grid = 512;
  double pde_dt = 2.5e-5;
  /// Initial law; empty = 1 + 0.5 cos(2 pi k_* theta).
  std::function<double(double)> initial;
  int threads = 0;
  /// Record |q_N(1..k_max)| at this many evenly spaced times per replicate (0 = none).
  int trajectory_records = 0;
  Index trajectory_modes = 4;
};

struct ChaosReport {
  Index mode = 0;
  double pde_order = 0.0;        // |q^(k_*)| of the PDE at T
  double particle_sq_mean = 0.0; // mean of the unbiased |q^(k_*)|^2 estimator
  double particle_sq_se = 0.0;
  double particle_abs_mean = 0.0; // mean |q_N(k_*)| (biased by ~sqrt(pi/(4N)) near q_u)
  double z = 0.0;                // (particle_sq_mean - pde_order^2) / se
  std::vector<double> replicate_sq;
  std::string initial_law;
  /// [replicate][record] rows of (t, |q_N(1)|, ..., |q_N(k_max)|)
  std::vector<std::vector<std::vector<double>>> trajectories;
};

/// Compares replicate particle runs against the PDE started from the same law.
ChaosReport chaos_check(const Potential& w, const ChaosOptions& opt);

void write_trajectory_csv(const std::vector<std::vector<double>>& rows, Index k_max, const std::string& path);

}  // namespace circlept
