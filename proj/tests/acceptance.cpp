// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// blocking criterion fails. Criterion 11 is exploratory and only reported.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "circlept/bessel.hpp"
#include "circlept/critical.hpp"
#include "circlept/flow.hpp"
#include "circlept/inequality.hpp"
#include "circlept/particles.hpp"
#include "circlept/spectral.hpp"

using namespace circlept;

namespace {

constexpr Index kGrid = 512;
constexpr double kTolK = 5e-3;

// Euler-Maruyama step and kernel truncation for the particle comparison; see the README
// for the step-size bias study behind the choice.
constexpr double kParticleDt = 5e-5;
constexpr Index kParticleTruncation = 16;

int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
  std::printf("[%s] %2d  %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void note(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  std::printf("        ");
  std::printf(fmt, a, b, c, d);
  std::printf("\n");
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

PhaseDiagram scan(const Potential& w) {
  ScanOptions o;
  o.tol_k = kTolK;
  o.grid_size = kGrid;
  return scan_kc(w, o);
}

double scanned_doi_kc = 3.0 * kPi / 4.0;

void criterion1() {
  const Potential w = make_potential(ModelParams::doi_onsager(), kGrid / 2);
  const PhaseDiagram d = scan(w);
  scanned_doi_kc = d.k_c;
  const bool pass = std::abs(d.k_c - 3.0 * kPi / 4.0) <= 0.01 && d.continuity == Continuity::Continuous &&
                    d.jump_estimate < 0.02;
  verdict(1, pass,
          fmt("Doi-Onsager K_c = %.6f (3pi/4 = %.6f), jump %.2e, ", d.k_c, 3.0 * kPi / 4.0, d.jump_estimate) +
              continuity_name(d.continuity));
}

void criterion2() {
  bool pass = true;
  const double bs = beta_star();
  const double residual = std::abs(bessel_i(2, bs) - 0.5 * bessel_i(1, bs));
  const bool bs_ok = residual <= 1e-10 && std::abs(bs - 2.447) <= 2e-3;
  pass &= bs_ok;
  note("beta_* = %.12f, |I_2 - I_1/2| = %.1e", bs, residual);
  for (double beta : {1.0, 1.5, 2.0, bs - 0.01}) {
    const Potential w = make_potential(ModelParams::transformer(beta), kGrid / 2);
    const PhaseDiagram d = scan(w);
    const double ks = beta / (2.0 * bessel_i(1, beta));
    const bool ok = d.continuity == Continuity::Continuous && std::abs(d.k_c - ks) <= 0.01;
    pass &= ok;
    note("beta %.4f: K_c %.6f, K_# %.6f, jump %.3f", beta, d.k_c, ks, d.jump_estimate);
    std::printf("          -> %s (want continuous, |K_c - K_#| <= 0.01)\n", ok ? "ok" : "MISS");
  }
  for (double beta : {2.6, 3.0, 4.0}) {
    const Potential w = make_potential(ModelParams::transformer(beta), kGrid / 2);
    const PhaseDiagram d = scan(w);
    const double ks = k_sharp(w).value;
    const bool ok = d.continuity == Continuity::Discontinuous && d.k_c <= ks - 0.01 && d.jump_estimate >= 0.05;
    pass &= ok;
    note("beta %.4f: K_c %.6f, K_# %.6f, margin %.2e", beta, d.k_c, ks, ks - d.k_c);
    std::printf("          jump %.3f, %s -> %s (want discontinuous, K_c <= K_# - 0.01, jump >= 0.05)\n",
                d.jump_estimate, continuity_name(d.continuity), ok ? "ok" : "MISS");
  }
  verdict(2, pass, "transformer dichotomy" + std::string(bs_ok ? "" : " (beta_* off)"));
}

void criterion3() {
  bool pass = true;
  const double rs = r_star();
  const bool rs_ok = std::abs(rs - 2.139) <= 2e-3;
  pass &= rs_ok;
  note("R_* = %.12f", rs);
  for (double r : {0.5, 1.0, 1.5}) {
    const Potential w = make_potential(ModelParams::hegselmann_krause(r), kGrid / 2);
    const PhaseDiagram d = scan(w);
    const double ks = k_sharp(w).value;
    const bool ok = d.continuity == Continuity::Discontinuous && d.k_c < ks - 0.01;
    pass &= ok;
    note("R %.4f: K_c %.6f, K_# %.6f, jump %.3f", r, d.k_c, ks, d.jump_estimate);
    std::printf("          -> %s (want discontinuous, K_c < K_# - 0.01)\n", ok ? "ok" : "MISS");
  }
  for (double r : {rs + 0.01, 2.5, 3.0}) {
    const Potential w = make_potential(ModelParams::hegselmann_krause(r), kGrid / 2);
    const PhaseDiagram d = scan(w);
    const double ks = k_sharp(w).value;
    const bool ok = d.continuity == Continuity::Continuous && std::abs(d.k_c - ks) <= 0.01;
    pass &= ok;
    note("R %.4f: K_c %.6f, K_# %.6f, jump %.3f", r, d.k_c, ks, d.jump_estimate);
    std::printf("          -> %s (want continuous, |K_c - K_#| <= 0.01)\n", ok ? "ok" : "MISS");
  }
  verdict(3, pass, "Hegselmann-Krause dichotomy" + std::string(rs_ok ? "" : " (R_* off)"));
}

void criterion4() {
  struct Case {
    ModelParams p;
    int n;
  };
  const Case cases[] = {{ModelParams::doi_onsager(), 1},        {ModelParams::transformer(1.0), 0},
                        {ModelParams::transformer(4.0), 0},     {ModelParams::hegselmann_krause(1.0), 0},
                        {ModelParams::hegselmann_krause(2.5), 0}, {ModelParams::log_gas(), 0}};
  bool pass = true;
  double worst = 0.0;
  int runs = 0;
  for (const Case& c : cases) {
    const Potential w = normalize(make_potential(c.p, kGrid / 2), c.n).potential;
    const auto seeds = standard_seeds(c.n, kGrid);
    for (double k : {0.2, 0.45})
      for (const Seed& s : seeds) {
        const SolveReport r = solve_fixed_point(w, k, s.density);
        double amp = 0.0;
        for (Index m = 1; m <= kGrid / 2; ++m) amp = std::max(amp, std::abs(r.density.coeff(m)));
        worst = std::max(worst, amp);
        ++runs;
        if (!r.converged || amp >= 1e-8) {
          pass = false;
          std::printf("          %s K=%.2f seed %s: converged %d, max |q^(k)| %.2e\n", c.p.label().c_str(), k,
                      s.id.c_str(), r.converged ? 1 : 0, amp);
        }
      }
  }
  verdict(4, pass, fmt("%.0f seeded solves at normalized K in {0.2, 0.45}; max |q^(k)| over all = %.2e", runs, worst));
}

void criterion5() {
  const std::vector<int> ns{0, 1, 2};
  const GapSuite e = entropy_gap_suite(ns, 500, 20240611, 1024);
  const GapSuite l = lebedev_milin_suite(ns, 500, 20240612, 1024);
  std::vector<double> cs;
  for (int i = 1; i <= 9; ++i) cs.push_back(0.1 * i);
  const auto ext = extremizer_suite(ns, cs, {0.0, 0.1234});
  double gap = 0.0, lm = 0.0, closed = 0.0;
  for (const ExtremizerCheck& c : ext) {
    gap = std::max(gap, std::abs(c.gap));
    lm = std::max(lm, std::abs(c.lm_gap));
    closed = std::max(closed, std::max(std::abs(c.entropy - c.closed_form), std::abs(c.dual - c.closed_form)));
  }
  // the identities are checked at M = 1024 as well as on the extremizer grid
  for (int n : ns)
    for (double c : cs) {
      const Density q = ExtremalFamily{n, c, 0.0}.sample(1024);
      closed = std::max(closed, std::abs(relative_entropy(q) + std::log(1 - c * c)));
      closed = std::max(closed, std::abs(dual_dirichlet_sum(q, n) + std::log(1 - c * c)));
    }
  note("entropy suite: %.0f samples, %.0f violations, min gap %.3e", e.samples.size(), e.violations, e.min_gap);
  note("Lebedev-Milin suite: %.0f samples, %.0f violations, min gap %.3e", l.samples.size(), l.violations, l.min_gap);
  note("extremizers: max |gap| %.2e, max |LM gap| %.2e, max closed-form error %.2e", gap, lm, closed);
  const bool pass = e.violations == 0 && l.violations == 0 && e.min_gap >= -1e-9 && l.min_gap >= -1e-9 &&
                    gap <= 1e-8 && lm <= 1e-8 && closed <= 1e-8;
  verdict(5, pass, "sharp inequality and Lebedev-Milin suites");
}

void criterion6() {
  struct Case {
    ModelParams p;
    int n;
  };
  const Case cases[] = {{ModelParams::doi_onsager(), 1},          {ModelParams::transformer(1.0), 0},
                        {ModelParams::transformer(3.0), 0},       {ModelParams::hegselmann_krause(1.0), 0},
                        {ModelParams::hegselmann_krause(2.5), 0}, {ModelParams::log_gas(), 0}};
  bool pass = true;
  double worst = 0.0;
  std::uint64_t seed = 600;
  for (const Case& c : cases) {
    const Potential w = normalize(make_potential(c.p, kGrid / 2), c.n).potential;
    const CoercivitySuite s = coercivity_suite(w, c.n, 200, seed++, kGrid);
    worst = std::max(worst, s.max_defect);
    pass &= s.pairs == 200 && s.max_defect <= 1e-9;
    std::printf("          %-28s 200 pairs, max |term1 + term2 - F| = %.2e\n", c.p.label().c_str(), s.max_defect);
  }
  verdict(6, pass, fmt("coercivity decomposition, worst defect %.2e", worst));
}

void criterion7() {
  // c^m rounded to double leaves ~2e-14 at n = 2, c = 0.7, so the family is built in long double
  using LVec = VecT<long double>;
  double stat = 0.0, stat_double = 0.0;
  for (int n : {1, 2})
    for (double c : {0.3, 0.7}) {
      LVec coeffs = LVec::Zero(33);
      Vec rounded = Vec::Zero(33);
      for (int m = 1; m * n <= 32; ++m) {
        coeffs[m * n] = std::pow(static_cast<long double>(c), static_cast<long double>(m));
        rounded[m * n] = std::pow(c, m);
      }
      const LVec r = loggas_rhs<long double>(coeffs, static_cast<long double>(n));
      stat = std::max(stat, static_cast<double>(r.cwiseAbs().maxCoeff()));
      stat_double = std::max(stat_double, loggas_rhs<double>(rounded, static_cast<double>(n)).cwiseAbs().maxCoeff());
    }
  note("stationary residual with double coefficients %.2e", stat_double);

  const Index mw = 64;
  const Potential lg = make_potential(ModelParams::log_gas(), mw);
  // the PDE step; explicit RK4 on 64 modes needs h 2 pi^2 64^2 below about 2.8
  const double k = 0.8, dt = 1e-4, ode_dt = 2e-5;
  const ExtremalFamily init{0, 0.3, 0.0};
  Density q = init.sample(kGrid);
  Vec c = Vec::Zero(mw + 1);
  for (Index m = 1; m <= mw; ++m) c[m] = std::pow(0.3, static_cast<double>(m));
  double traj = 0.0;
  for (int block = 1; block <= 10; ++block) {
    for (int s = 0; s < 1000; ++s) q = mv_step(q, lg, k, dt);
    c = loggas_rk4<double>(c, k, 0.1, ode_dt);
    for (Index m = 1; m <= mw; ++m) traj = std::max(traj, std::abs(q.coeff(m) - Complex(c[m], 0.0)));
  }
  const bool pass = stat <= 1e-14 && traj <= 1e-6;
  verdict(7, pass, fmt("log-gas: stationary residual %.2e, ODE vs PDE sup over t in [0,1] %.2e", stat, traj));
}

void criterion8() {
  const Potential w = make_potential(ModelParams::doi_onsager(), kGrid / 2);
  const double k = 3.0 * kPi / 8.0;
  const SpectralGap gap = lambda_star(w, k, 1);
  const Density q0 = density_from_function([](double t) { return 1.0 + 1e-2 * std::cos(4.0 * kPi * t); }, kGrid);
  RecordPolicy policy;
  policy.modes = {2};
  const FlowTrace tr = integrate(q0, w, k, 0.5, 1e-4, policy);
  const RateFit f = fit_rate(tr, Observable::W2, RateModel::Exponential);
  // the flow runs on [-1/2, 1/2) with generator (1/2) d^2; mode k relaxes at 4 pi^2 (k^2/2)(1 - 2K W^(k))
  const double predicted = 4.0 * kPi * kPi * gap.value;
  const double rel = std::abs(f.rate / predicted - 1.0);
  note("lambda_* = %.12f at mode %.0f; fitted W2 rate %.6f on [%.3f, ...]", gap.value, gap.mode, f.rate, f.t_lo);
  verdict(8, std::abs(gap.value - 1.0) < 1e-12 && rel <= 0.05,
          fmt("subcritical W2 rate / (4 pi^2 lambda_*) = %.5f (relative error %.2e), R^2 %.8f", f.rate / predicted, rel,
              f.r2));
}

void criterion9() {
  double worst = 0.0;
  for (double w2 : {0.0, 0.5, 0.6, 0.9}) {
    const LandauMin<double> m = landau_min(w2);
    const double closed = (1.0 - 2.0 * w2) / (64.0 * (1.0 - w2));
    worst = std::max(worst, std::abs(landau_p(w2, m.c_star) - closed));
    worst = std::max(worst, std::abs(m.p_star - closed));
    // stationarity of p at c_*
    worst = std::max(worst, std::abs((1.0 - w2) * m.c_star / 2.0 - 0.125));
  }
  const bool sign = landau_min(0.49).p_star > 0.0 && landau_min(0.5).p_star == 0.0 && landau_min(0.51).p_star < 0.0;
  verdict(9, worst <= 1e-14 && sign,
          fmt("Landau minimum max error %.1e; sign of p_* changes at w2 = 1/2: ", worst) + (sign ? "yes" : "no"));
}

void criterion10() {
  const Potential w = make_potential(ModelParams::doi_onsager(), kParticleTruncation);
  ChaosOptions o;
  o.k = 1.2 * scanned_doi_kc;
  o.n = 5000;
  o.t_end = 5.0;
  o.replicates = 16;
  o.dt = kParticleDt;
  o.seed = 1;
  const auto start = std::chrono::steady_clock::now();
  const ChaosReport r = chaos_check(w, o);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  note("K = %.6f, dt = %.1e, M_W = %.0f", o.k, o.dt, static_cast<double>(kParticleTruncation));
  note("PDE |q(2)|^2 = %.5f, particles %.5f +- %.5f", r.pde_order * r.pde_order, r.particle_sq_mean, r.particle_sq_se);
  verdict(10, std::abs(r.z) <= 3.0 && secs <= 600.0,
          fmt("particle consistency z = %.3f (|z| <= 3), runtime %.0f s (<= 600 s)", r.z, secs));
}

void criterion11() {
  std::printf("[INFO] 11  exploratory critical exponents (reported, not asserted)\n");
  // a large initial amplitude reaches the algebraic regime well before t = 10; at eps = 1e-2 the
  // decay is still on its plateau at t = 20
  auto exponent = [](const Potential& w, double k, int mode) {
    const Density q0 = density_from_function(
        [mode](double t) { return 1.0 + 0.9 * std::cos(kTwoPi * mode * t); }, 128);
    RecordPolicy policy;
    policy.modes = {mode};
    const FlowTrace tr = integrate(q0, w, k, 100.0, 2e-4, policy);
    return fit_rate(tr, Observable::W2, RateModel::Algebraic, 0, std::make_pair(10.0, 100.0));
  };
  {
    const RateFit f = exponent(make_potential(ModelParams::doi_onsager(), 64), 3.0 * kPi / 4.0, 2);
    note("Doi-Onsager at K_c: W2 exponent %.4f (R^2 %.6f), predicted range [-0.6, -0.4]", f.exponent, f.r2);
    std::printf("          %s\n", f.exponent >= -0.6 && f.exponent <= -0.4 ? "inside" : "outside");
  }
  {
    const Potential w = make_potential(ModelParams::transformer(beta_star()), 64);
    const RateFit f = exponent(w, k_sharp(w).value, 1);
    note("transformer at beta_*, K_#: W2 exponent %.4f (R^2 %.6f), predicted range about [-0.35, -0.15]", f.exponent,
         f.r2);
    std::printf("          %s\n", f.exponent >= -0.35 && f.exponent <= -0.15 ? "inside" : "outside");
  }
}

}  // namespace

int main(int argc, char** argv) {
  // optional list of criterion numbers to run, e.g. `acceptance 1 8`
  std::vector<bool> selected(12, argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id >= 1 && id <= 11) selected[static_cast<std::size_t>(id)] = true;
  }
  void (*const table[])() = {nullptr,     criterion1, criterion2, criterion3, criterion4,  criterion5,
                             criterion6, criterion7, criterion8, criterion9, criterion10, criterion11};
  for (int id = 1; id <= 11; ++id) {
    if (!selected[static_cast<std::size_t>(id)]) continue;
    try {
      table[id]();
    } catch (const std::exception& e) {
      if (id == 11) {
        std::printf("[INFO] 11  exploratory run failed: %s\n", e.what());
      } else {
        verdict(id, false, std::string("exception: ") + e.what());
      }
    }
  }
  std::printf("%d blocking criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
