#pragma once

// Spectral functionals of densities on the torus.

#include <optional>

#include "circlept/density.hpp"
#include "circlept/potential.hpp"

namespace circlept {

/// H(q | q_u) = int q log q, rectangle rule; zero entries contribute 0.
///
/// Evaluated as mean((1+x) log(1+x) - x) with x = q - 1, which equals the plain form for
/// unit-mass q but stays accurate to ~1e-20 near q_u. Throws NegativeDensity when
/// the raw grid values went below -1e-12.
double relative_entropy(const Density& q);

/// (n+1) sum_{k>=1} |q^(k)|^2 / k.
double dual_dirichlet_sum(const Density& q, int n);

/// 2 sum_{k>=1} W^(k) |q^(k)|^2 over the modes resolved by the grid.
///
/// With `tail_tolerance`, throws TruncationTooCoarse if the analytic tail of W beyond
/// the resolved modes exceeds it.
double interaction_energy(const Density& q, const Potential& w, std::optional<double> tail_tolerance = {});

/// F_K(q) = H(q | q_u) - K * interaction_energy(q, W).
double free_energy(const Density& q, const Potential& w, double k);

/// Coefficients W^(k) q^(k), k = 0..M/2.
CVec convolve_fourier(const Potential& w, const CVec& q_hat);

/// Grid values of W * q.
Vec convolve(const Potential& w, const Density& q);

/// Grid values of (W * q)' = W' * q.
Vec convolve_derivative(const Potential& w, const Density& q);

enum class Metric { L1, L2, W2Circle };

const char* metric_name(Metric metric);

/// L1 and L2 by rectangle rule; W2Circle between the piecewise-constant interpolants.
///
/// W2 minimizes the quantile coupling cost over the rotation offset alpha,
///   cost(alpha) = int_0^1 (F^{-1}(t + alpha) - G^{-1}(t))^2 dt,
/// which is convex in alpha; each cost is integrated exactly on merged breakpoints.
double distance(const Density& p, const Density& q, Metric metric);

}  // namespace circlept
