#include "circlept/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "circlept/parallel.hpp"
#include "circlept/spectral.hpp"

namespace circlept {

namespace {

constexpr double kViolation = -1e-9;
constexpr double kConstraintTol = 1e-9;

void summarize(GapSuite& s) {
  std::vector<double> gaps;
  for (const auto& x : s.samples) gaps.push_back(x.gap);
  if (gaps.empty()) return;
  std::sort(gaps.begin(), gaps.end());
  s.min_gap = gaps.front();
  s.max_gap = gaps.back();
  s.median_gap = gaps[gaps.size() / 2];
  s.violations = static_cast<int>(std::count_if(gaps.begin(), gaps.end(), [](double g) { return g < kViolation; }));
}

std::uint64_t sample_seed(std::uint64_t seed, int n, int i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(i)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

double lebedev_milin_constraint(const Vec& phi, int n) {
  const double top = phi.maxCoeff();
  const Vec e = (phi.array() - top).exp().matrix();
  const CVec eh = to_fourier(e);
  double worst = 0.0;
  for (Index k = 1; k <= n && k < eh.size(); ++k) worst = std::max(worst, std::abs(eh[k]) / eh[0].real());
  return worst;
}

double lebedev_milin_gap(const Vec& phi, int n) {
  if (!phi.allFinite()) throw Error(ErrorCode::NotFinite, "phi contains NaN or Inf");
  const Index m = phi.size();
  const double constraint = lebedev_milin_constraint(phi, n);
  if (constraint > kConstraintTol)
    throw Error(ErrorCode::ConstraintViolated, "tilted moment " + std::to_string(constraint) + " exceeds 1e-9");
  const CVec ph = to_fourier(phi);
  double energy = 0.0;
  for (Index k = 1; k <= m / 2; ++k) energy += 0.5 * parseval_weight(k, m) * static_cast<double>(k) * std::norm(ph[k]);
  energy /= static_cast<double>(n + 1);
  const double top = phi.maxCoeff();
  const double log_mean_exp = top + std::log((phi.array() - top).exp().mean());
  return energy - (log_mean_exp - phi.mean());
}

double off_lattice_amplitude(const Density& q, int n) {
  const Index p = n + 1;
  double worst = 0.0;
  for (Index k = 1; k <= q.grid_size() / 2; ++k)
    if (k % p != 0) worst = std::max(worst, std::abs(q.fourier()[k]));
  return worst;
}

double entropy_seminorm_gap(const Density& q, int n) {
  const double off = off_lattice_amplitude(q, n);
  if (off > 1e-9)
    throw Error(ErrorCode::PeriodicityViolated,
                "off-lattice amplitude " + std::to_string(off) + " for n=" + std::to_string(n));
  return relative_entropy(q) - dual_dirichlet_sum(q, n);
}

Coercivity coercivity_gap(const Density& q, const Potential& w, double k, int n) {
  const Index p = n + 1;
  if (std::abs(2.0 * w.coeff(p) - 1.0) > 1e-12)
    throw Error(ErrorCode::NotNormalized, "coercivity split needs 2W^(n+1) = 1");
  const Index m = q.grid_size();
  Coercivity c;
  c.periodic = off_lattice_amplitude(q, n) <= 1e-9;
  c.term1 = relative_entropy(q) - dual_dirichlet_sum(q, n);
  const Index top = std::min(w.truncation(), m / 2);
  for (Index j = 1; j <= m / 2; ++j) {
    const double wj = j <= top ? w.coeff(j) : 0.0;
    const double coef = static_cast<double>(p) / static_cast<double>(j) - 2.0 * k * wj;
    c.term2 += 0.5 * parseval_weight(j, m) * coef * std::norm(q.fourier()[j]);
  }
  c.total = free_energy(q, w, k);
  return c;
}

CoercivitySuite coercivity_suite(const Potential& w, int n, int pairs, std::uint64_t seed, Index m) {
  CoercivitySuite out;
  out.pairs = pairs;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coupling(0.0, 2.0);
  for (int i = 0; i < pairs; ++i) {
    const double k = coupling(rng);
    const std::uint64_t s = sample_seed(seed, n, i);
    const Density q = random_admissible_density(i % 2 == 0 ? n : 0, m, s);
    const double d = coercivity_gap(q, w, k, n).defect();
    if (d > out.max_defect) {
      out.max_defect = d;
      out.max_k = k;
      out.worst_seed = s;
    }
  }
  return out;
}

Vec random_periodic_exponent(int n, Index m, std::uint64_t seed, Index max_harmonic, double budget) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double amplitude = budget * 0.5 * (1.0 + unit(rng));
  const Index harmonics = 1 + static_cast<Index>(std::floor(0.5 * (1.0 + unit(rng)) * static_cast<double>(max_harmonic)));
  std::vector<double> a(static_cast<std::size_t>(harmonics)), b(static_cast<std::size_t>(harmonics));
  for (Index l = 0; l < harmonics; ++l) {
    a[static_cast<std::size_t>(l)] = amplitude * unit(rng) / static_cast<double>(l + 1);
    b[static_cast<std::size_t>(l)] = amplitude * unit(rng) / static_cast<double>(l + 1);
  }
  const double p = static_cast<double>(n + 1);
  Vec psi(m);
  for (Index j = 0; j < m; ++j) {
    const double t = grid_point(j, m);
    double s = 0.0;
    for (Index l = 0; l < harmonics; ++l) {
      const double x = kTwoPi * p * static_cast<double>(l + 1) * t;
      s += a[static_cast<std::size_t>(l)] * std::cos(x) + b[static_cast<std::size_t>(l)] * std::sin(x);
    }
    psi[j] = s;
  }
  return psi.array() - psi.mean();
}

Density random_admissible_density(int n, Index m, std::uint64_t seed, Index max_harmonic, double budget) {
  const Vec psi = random_periodic_exponent(n, m, seed, max_harmonic, budget);
  return density_from_grid((psi.array() - psi.maxCoeff()).exp().matrix());
}

GapSuite entropy_gap_suite(const std::vector<int>& ns, int samples, std::uint64_t seed, Index m, int threads) {
  GapSuite suite;
  suite.name = "entropy_seminorm";
  for (int n : ns) {
    std::vector<GapSample> block(static_cast<std::size_t>(samples));
    parallel_for(samples, threads, [&](Index i) {
      const std::uint64_t s = sample_seed(seed, n, static_cast<int>(i));
      const Density q = random_admissible_density(n, m, s);
      block[static_cast<std::size_t>(i)] = {n, s, entropy_seminorm_gap(q, n), off_lattice_amplitude(q, n)};
    });
    suite.samples.insert(suite.samples.end(), block.begin(), block.end());
  }
  summarize(suite);
  return suite;
}

GapSuite lebedev_milin_suite(const std::vector<int>& ns, int samples, std::uint64_t seed, Index m, int threads) {
  GapSuite suite;
  suite.name = "lebedev_milin";
  for (int n : ns) {
    std::vector<GapSample> block(static_cast<std::size_t>(samples));
    parallel_for(samples, threads, [&](Index i) {
      const std::uint64_t s = sample_seed(seed ^ 0x5bd1e995ULL, n, static_cast<int>(i));
      const Vec phi = random_periodic_exponent(n, m, s);
      block[static_cast<std::size_t>(i)] = {n, s, lebedev_milin_gap(phi, n), lebedev_milin_constraint(phi, n)};
    });
    suite.samples.insert(suite.samples.end(), block.begin(), block.end());
  }
  summarize(suite);
  return suite;
}

std::vector<ExtremizerCheck> extremizer_suite(const std::vector<int>& ns, const std::vector<double>& cs,
                                              const std::vector<double>& shifts, Index m) {
  std::vector<ExtremizerCheck> out;
  for (int n : ns) {
    for (double c : cs) {
      for (double shift : shifts) {
        const ExtremalFamily fam{n, c, shift};
        const Density q = fam.sample(m);
        ExtremizerCheck e;
        e.n = n;
        e.c = c;
        e.shift = shift;
        e.entropy = relative_entropy(q);
        e.dual = dual_dirichlet_sum(q, n);
        e.closed_form = -std::log1p(-c * c);
        e.gap = entropy_seminorm_gap(q, n);
        Vec phi(m);
        const double p = static_cast<double>(n + 1);
        for (Index j = 0; j < m; ++j)
          phi[j] = -std::log(1.0 + c * c - 2.0 * c * std::cos(kTwoPi * p * (grid_point(j, m) - shift)));
        e.lm_gap = lebedev_milin_gap(phi, n);
        out.push_back(e);
      }
    }
  }
  return out;
}

std::string gap_suite_json(const GapSuite& suite) {
  nlohmann::json j;
  j["suite"] = suite.name;
  j["violations"] = suite.violations;
  j["summary"] = {{"min", suite.min_gap}, {"median", suite.median_gap}, {"max", suite.max_gap}};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : suite.samples)
    rows.push_back({{"n", s.n}, {"seed", s.seed}, {"gap", s.gap}, {"constraint_residual", s.constraint}});
  j["samples"] = rows;
  return j.dump(2);
}

void write_gap_suite_csv(const GapSuite& suite, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path);
  out.precision(17);
  out << "n,seed,gap,constraint_residual\n";
  for (const auto& s : suite.samples) out << s.n << ',' << s.seed << ',' << s.gap << ',' << s.constraint << '\n';
}

}  // namespace circlept
