#pragma once

#include <functional>
#include <string>

#include "circlept/fourier.hpp"

namespace circlept {

/// Probability density on T held as grid values and one-sided Fourier coefficients.
///
/// Immutable after construction. Construction clips small negative values (recorded in
/// `clipped_mass()`), renormalizes to unit mass and fills the Fourier side from the
/// final grid values, so q^(0) = 1 and the two representations agree.
class Density {
 public:
  /// Uniform density q_u on an M-point grid.
  static Density uniform(Index m);

  Index grid_size() const { return values_.size(); }
  const Vec& values() const { return values_; }
  const CVec& fourier() const { return fourier_; }

  /// q^(k) for |k| <= M/2 via Hermitian symmetry; zero outside the grid band.
  Complex coeff(Index k) const;

  /// Total negative mass removed by clipping (sum of |q_j| / M over q_j < 0).
  double clipped_mass() const { return clipped_mass_; }
  /// Smallest value seen before clipping.
  double min_raw_value() const { return min_raw_; }
  /// True if the input mean was off by more than 1e-8 and had to be rescaled.
  bool renormalized() const { return renormalized_; }

 private:
  friend Density density_from_grid(const Vec& values);
  Density() = default;

  Vec values_;
  CVec fourier_;
  double clipped_mass_ = 0.0;
  double min_raw_ = 0.0;
  bool renormalized_ = false;
};

/// Builds a Density from grid samples.
///
/// Throws NotFinite, NonPositiveMass, BadGridSize, and NegativeDensity when more
/// than 1e-6 of mass would have to be clipped.
Density density_from_grid(const Vec& values);

/// Samples a function on the grid and normalizes it.
Density density_from_function(const std::function<double(double)>& f, Index m);

/// Density whose Fourier coefficients are given (k = 0..M/2); q^(0) is forced to 1.
Density density_from_fourier(const CVec& coeffs, Index m);

/// Rotates by a whole number of grid cells: q'(theta_j) = q(theta_{j - cells}).
Density rotate(const Density& q, Index cells);

/// Poisson-kernel family q_{c,n}(theta - theta0) = (1-c^2) / (1 + c^2 - 2c cos(2 pi (n+1)(theta - theta0))).
struct ExtremalFamily {
  int n = 0;
  double c = 0.0;
  double shift = 0.0;

  double operator()(double theta) const;
  /// Exact coefficient: c^l e^{-2 pi i (n+1) l theta0} at k = (n+1) l, zero off the lattice.
  Complex coefficient(Index k) const;
  Density sample(Index m) const;
};

// Serialization: JSON {grid_size, grid_values}, CSV (theta, q), and a raw binary column.
std::string density_to_json(const Density& q);
Density density_from_json(const std::string& text);
void write_density_csv(const Density& q, const std::string& path);
void write_density_binary(const Density& q, const std::string& path);
Density read_density_binary(const std::string& path);

}  // namespace circlept
