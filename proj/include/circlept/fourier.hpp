#pragma once

// Grid <-> Fourier transforms on the torus T = [-1/2, 1/2).
//
// Grid nodes are theta_j = -1/2 + j/M. Coefficients follow
//   f^(k) = int f(theta) e^{-2 pi i k theta} dtheta,
// approximated by the rectangle rule, and are stored one-sided for k = 0..M/2.

#include "circlept/types.hpp"

namespace circlept {

bool is_power_of_two(Index m);

/// Node theta_j of an M-point grid.
inline double grid_point(Index j, Index m) { return -0.5 + static_cast<double>(j) / static_cast<double>(m); }

Vec grid_points(Index m);

/// One-sided coefficients f^(0..M/2) of grid values.
CVec to_fourier(const Vec& values);

/// Grid values of a real function from its one-sided coefficients (size M/2+1).
Vec to_grid(const CVec& coeffs, Index m);

/// Weight of mode k in a one-sided Parseval sum over k = 1..M/2: 2, except 1 at Nyquist.
inline double parseval_weight(Index k, Index m) { return (2 * k == m) ? 1.0 : 2.0; }

/// Zero every coefficient with k > M/3 (2/3 rule).
void dealias(CVec& coeffs, Index m);

}  // namespace circlept
