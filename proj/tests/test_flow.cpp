#include <doctest.h>

#include <cmath>

#include "circlept/critical.hpp"
#include "circlept/flow.hpp"
#include "support.hpp"

using namespace circlept;

namespace {

Density cosine(double a, int k, Index m) {
  return density_from_function([=](double t) { return 1.0 + a * std::cos(kTwoPi * k * t); }, m);
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("single steps") {
  const Potential doi = make_potential(ModelParams::doi_onsager(), 128);
  const Density u = Density::uniform(256);
  CHECK((mv_step(u, doi, 2.0, 1e-4).values() - u.values()).cwiseAbs().maxCoeff() < 1e-15);

  const double dt = 1e-3;
  const Density heat = mv_step(cosine(1.0, 1, 256), doi, 0.0, dt);
  const double decay = std::exp(-2.0 * kPi * kPi * dt);
  for (Index j = 0; j < 256; ++j)
    CHECK(std::abs(heat.values()[j] - (1.0 + decay * std::cos(kTwoPi * grid_point(j, 256)))) < 1e-12);

  CHECK_THROWS_AS(mv_step(cosine(0.9, 2, 256), doi, 1e3, 1e-2), Error);
}

TEST_CASE("free energy decreases step by step") {
  const Potential w = normalize(make_potential(ModelParams::doi_onsager(), 128), 1).potential;
  Density q = density_from_function([](double t) { return 1.0 + 0.05 * std::cos(4 * kPi * t) + 0.02 * std::cos(8 * kPi * t); }, 256);
  double f = free_energy(q, w, 1.2);
  for (int s = 0; s < 5000; ++s) {
    q = mv_step(q, w, 1.2, 4e-5);
    const double next = free_energy(q, w, 1.2);
    CHECK(next <= f + 1e-9);
    f = next;
    CHECK(std::abs(q.coeff(0) - 1.0) < 1e-12);
  }
}

TEST_CASE("integrate") {
  const Potential doi = make_potential(ModelParams::doi_onsager(), 256);
  SUBCASE("subcritical relaxation") {
    const FlowTrace tr = integrate(cosine(0.1, 2, 512), doi, 3.0 * kPi / 8.0, 1.0, 1e-4);
    REQUIRE(tr.terminal.has_value());
    CHECK(order_parameter(*tr.terminal, 2) < 1e-8);
    CHECK(tr.l2.back() < tr.l2.front());
    for (double m : tr.mass_defect) CHECK(m <= 1e-11);
    for (std::size_t i = 1; i < tr.size(); ++i) CHECK(tr.free_energy[i] <= tr.free_energy[i - 1] + 1e-9);
  }
  SUBCASE("zero coupling") {
    testsupport::Gen g(31);
    const FlowTrace tr = integrate(g.density(256, 4), doi, 0.0, 1.0, 1e-4);
    CHECK(distance(*tr.terminal, Density::uniform(256), Metric::L2) < 1e-8);
  }
  SUBCASE("supercritical flow reaches the minimizer") {
    const double k = 1.2 * 3.0 * kPi / 4.0;
    const Potential coarse = make_potential(ModelParams::doi_onsager(), 128);
    const FlowTrace tr = integrate(cosine(0.3, 2, 256), coarse, k, 3.0, 4e-5);
    CHECK(tr.final_residual < 1e-10);
    const MinimizerResult m = find_minimizer(coarse, k, standard_seeds(1, 256));
    // the flow can land on any translate; align by the phase of mode 2
    const double phase = std::arg(tr.terminal->coeff(2)) - std::arg(m.best.density.coeff(2));
    const double cells = -phase / (kTwoPi * 2.0) * 256.0;
    const Index shift = static_cast<Index>(std::lround(cells));
    const Density aligned = rotate(m.best.density, ((shift % 256) + 256) % 256);
    CHECK(std::abs(cells - static_cast<double>(shift)) < 1e-6);
    CHECK(distance(*tr.terminal, aligned, Metric::L2) < 1e-6);
  }
  CHECK_THROWS_AS(integrate(Density::uniform(64), doi, 1.0, 0.0, 1e-4), Error);
}

TEST_CASE("stationarity residual") {
  const Potential doi = make_potential(ModelParams::doi_onsager(), 256);
  CHECK(stationarity_residual(Density::uniform(512), doi, 2.0) < 1e-13);
  CHECK(stationarity_residual(cosine(0.5, 1, 512), doi, 1.0) > 0.1);
  const SolveReport r = solve_fixed_point(doi, 2.8, cosine(0.5, 2, 512));
  REQUIRE(r.converged);
  CHECK(stationarity_residual(r.density, doi, 2.8) < 10 * 1e-11 * 100);
}

TEST_CASE("log-gas hierarchy") {
  CHECK(loggas_rhs<double>(Vec::Zero(33), 1.0).cwiseAbs().maxCoeff() == 0.0);
  for (int n : {1, 2})
    for (double c : {0.3, 0.5, 0.7}) {
      VecT<long double> exact = VecT<long double>::Zero(33);
      Vec coeffs = Vec::Zero(33);
      for (int m = 1; m * n <= 32; ++m) {
        exact[m * n] = std::pow(static_cast<long double>(c), static_cast<long double>(m));
        coeffs[m * n] = std::pow(c, m);
      }
      CHECK(loggas_rhs<long double>(exact, static_cast<long double>(n)).cwiseAbs().maxCoeff() <= 1e-14L);
      // double coefficients carry the rounding of c^m, amplified by 2 pi^2 k
      CHECK(loggas_rhs<double>(coeffs, static_cast<double>(n)).cwiseAbs().maxCoeff() <= 1e-13);
    }
  {
    Vec half = Vec::Zero(33);
    for (int m = 1; m <= 32; ++m) half[m] = std::pow(0.5, m);
    CHECK(loggas_rhs<double>(half, 1.0).cwiseAbs().maxCoeff() <= 1e-14);
  }

  // heat decay under RK4, fourth order in the step
  Vec c0 = Vec::Zero(5);
  c0[1] = 0.3;
  c0[2] = 0.1;
  std::vector<double> hs{0.004, 0.002, 0.001}, errs;
  for (double h : hs) {
    const Vec c = loggas_rk4<double>(c0, 0.0, 0.2, h);
    errs.push_back(std::abs(c[2] / (0.1 * std::exp(-8.0 * kPi * kPi * 0.2)) - 1.0));
  }
  const double slope = testsupport::log_slope(hs, errs);
  CHECK(slope > 3.8);
  CHECK(slope < 4.2);
}

TEST_CASE("rate fits") {
  std::vector<double> t, y;
  for (int i = 0; i < 100; ++i) {
    t.push_back(0.01 * (i + 1));
    y.push_back(std::exp(-3.0 * t.back()));
  }
  const RateFit f = fit_rate(t, y, RateModel::Exponential);
  CHECK(std::abs(f.rate - 3.0) < 1e-6);
  CHECK(f.r2 > 0.999999);

  std::vector<double> ya;
  for (double s : t) ya.push_back(std::pow(s, -0.5));
  const RateFit a = fit_rate(t, ya, RateModel::Algebraic);
  CHECK(std::abs(a.exponent + 0.5) < 1e-9);

  CHECK_THROWS_AS(fit_rate(std::vector<double>(t.begin(), t.begin() + 10), std::vector<double>(y.begin(), y.begin() + 10),
                           RateModel::Exponential),
                  Error);
}

TEST_CASE("linearized decay rates") {
  const Potential doi = make_potential(ModelParams::doi_onsager(), 256);
  const double k = 1.5;
  for (int mode : {2, 4}) {
    const double eps = 1e-4;
    Density q = cosine(eps, mode, 256);
    for (int s = 0; s < 200; ++s) q = mv_step(q, doi, k, 1e-4);
    const double observed = -std::log(std::abs(q.coeff(mode)) / (eps / 2)) / 0.02;
    const double predicted = 4.0 * kPi * kPi * (mode * mode / 2.0) * (1.0 - 2.0 * k * doi.coeff(mode));
    CHECK(std::abs(observed - predicted) <= 0.01 * predicted);
  }
}

TEST_CASE("second order in dt") {
  const Potential w = make_potential(ModelParams::transformer(2.0), 64);
  const Density q0 = cosine(0.4, 1, 128);
  auto run = [&](double dt) {
    Density q = q0;
    const int steps = static_cast<int>(std::lround(0.05 / dt));
    for (int s = 0; s < steps; ++s) q = mv_step(q, w, 1.0, dt);
    return q;
  };
  const Density a = run(2e-4), b = run(1e-4), c = run(5e-5);
  const double e1 = distance(a, b, Metric::L2), e2 = distance(b, c, Metric::L2);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);
}

TEST_CASE("truncated log-gas flow matches the hierarchy") {
  const Index mw = 32;
  const Potential lg = make_potential(ModelParams::log_gas(), mw);
  const double k = 0.7;
  Density q = cosine(0.2, 1, 256);
  Vec c = Vec::Zero(mw + 1);
  c[1] = 0.1;
  const double dt = 1e-4;
  for (int s = 0; s < 5000; ++s) q = mv_step(q, lg, k, dt);
  // explicit RK4 is stable for h 2 pi^2 M_W^2 below about 2.8
  c = loggas_rk4<double>(c, k, 0.5, 5e-5);
  double worst = 0.0;
  for (Index m = 1; m <= mw; ++m) worst = std::max(worst, std::abs(q.coeff(m).real() - c[m]));
  CHECK(worst < 1e-6);
}

}
