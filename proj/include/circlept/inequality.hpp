#pragma once

// Sharp entropy inequalities on the circle and the coercivity split of F_K.

#include <cstdint>
#include <string>
#include <vector>

#include "circlept/density.hpp"
#include "circlept/potential.hpp"

namespace circlept {

/// (1/(n+1)) sum_{k>=1} k |phi^(k)|^2 - [log int e^phi - int phi].
///
/// Requires |int e^phi e^{2 pi i k theta}| <= 1e-9 int e^phi for 1 <= k <= n
/// (ConstraintViolated otherwise).
double lebedev_milin_gap(const Vec& phi, int n);

/// Largest relative tilted moment max_{1<=k<=n} |int e^phi e^{2 pi i k theta}| / int e^phi.
double lebedev_milin_constraint(const Vec& phi, int n);

/// H(q | q_u) - dual_dirichlet_sum(q, n). Throws PeriodicityViolated when an
/// off-lattice coefficient exceeds 1e-9.
double entropy_seminorm_gap(const Density& q, int n);

/// Largest |q^(k)| over k not divisible by n+1.
double off_lattice_amplitude(const Density& q, int n);

struct Coercivity {
  double term1 = 0.0;  // H - (n+1) sum |q^(k)|^2 / k
  double term2 = 0.0;  // sum ((n+1)/k - 2K W^(k)) |q^(k)|^2
  double total = 0.0;  // F_K(q), evaluated independently
  bool periodic = false;
  double defect() const { return std::abs(term1 + term2 - total); }
};

/// Throws NotNormalized unless 2 W^(n+1) = 1 (1e-12).
Coercivity coercivity_gap(const Density& q, const Potential& w, double k, int n);

struct CoercivitySuite {
  int pairs = 0;
  double max_defect = 0.0;  // max |term1 + term2 - F_K|
  double max_k = 0.0;       // K of the worst pair
  std::uint64_t worst_seed = 0;
};

/// coercivity_gap on random (q, K) pairs, K uniform in [0, 2). Even samples draw q from the
/// 1/(n+1)-periodic family, odd ones from the unrestricted family. `w` must satisfy 2 W^(n+1) = 1.
CoercivitySuite coercivity_suite(const Potential& w, int n, int pairs, std::uint64_t seed, Index m = 512);

/// e^psi / Z with psi a random 1/(n+1)-periodic trigonometric polynomial.
Density random_admissible_density(int n, Index m, std::uint64_t seed, Index max_harmonic = 6, double budget = 2.0);
/// The exponent psi itself (centered), usable as a Lebedev-Milin test function.
Vec random_periodic_exponent(int n, Index m, std::uint64_t seed, Index max_harmonic = 6, double budget = 2.0);

struct GapSample {
  int n = 0;
  std::uint64_t seed = 0;
  double gap = 0.0;
  double constraint = 0.0;  // off-lattice amplitude or tilted-moment residual
};

struct GapSuite {
  std::string name;
  std::vector<GapSample> samples;
  int violations = 0;  // gap < -1e-9
  double min_gap = 0.0;
  double median_gap = 0.0;
  double max_gap = 0.0;
};

/// entropy_seminorm_gap on random admissible densities, `samples` per n.
GapSuite entropy_gap_suite(const std::vector<int>& ns, int samples, std::uint64_t seed, Index m = 1024,
                           int threads = 0);
/// lebedev_milin_gap on random periodic exponents, `samples` per n.
GapSuite lebedev_milin_suite(const std::vector<int>& ns, int samples, std::uint64_t seed, Index m = 1024,
                             int threads = 0);

struct ExtremizerCheck {
  int n = 0;
  double c = 0.0;
  double shift = 0.0;
  double entropy = 0.0;
  double dual = 0.0;
  double closed_form = 0.0;  // -log(1 - c^2)
  double gap = 0.0;
  double lm_gap = 0.0;
};

/// Evaluates the family q_{c,n}(. - shift) and its Lebedev-Milin exponent on an M-point grid.
std::vector<ExtremizerCheck> extremizer_suite(const std::vector<int>& ns, const std::vector<double>& cs,
                                              const std::vector<double>& shifts, Index m = 2048);

std::string gap_suite_json(const GapSuite& suite);
void write_gap_suite_csv(const GapSuite& suite, const std::string& path);

}  // namespace circlept
