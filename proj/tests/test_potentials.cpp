#include <doctest.h>

#include <cmath>

#include "circlept/bessel.hpp"
#include "circlept/potential.hpp"
#include "support.hpp"

using namespace circlept;

TEST_SUITE("potentials") {

TEST_CASE("catalog coefficients") {
  const Potential doi = make_potential(ModelParams::doi_onsager(), 64);
  CHECK(std::abs(doi.coeff(2) - 2.0 / (3.0 * kPi)) < 1e-15);
  CHECK(std::abs(doi.coeff(4) - 2.0 / (15.0 * kPi)) < 1e-15);
  for (Index k = 1; k <= 63; k += 2) CHECK(doi.coeff(k) == 0.0);
  CHECK(doi.periodicity() == 1);
  CHECK(doi.coeff(65) == 0.0);

  CHECK(std::abs(make_potential(ModelParams::hegselmann_krause(kPi), 64).coeff(1) - 2.0) < 1e-14);

  const Potential lg = make_potential(ModelParams::log_gas(), 64);
  for (Index k = 1; k <= 64; ++k) CHECK(std::abs(lg.coeff(k) - 0.5 / static_cast<double>(k)) < 1e-16);

  const Potential tr = make_potential(ModelParams::transformer(2.0), 64);
  for (int l = 1; l <= 10; ++l)
    CHECK(std::abs(tr.coeff(l) - static_cast<double>(testsupport::bessel_series_30(l, 2.0L)) / 2.0) < 1e-15);
}

TEST_CASE("construction errors") {
  CHECK_THROWS_AS(make_potential(ModelParams::transformer(-1.0), 64), Error);
  CHECK_THROWS_AS(make_potential(ModelParams::hegselmann_krause(4.0), 64), Error);
  CHECK_THROWS_AS(make_potential(ModelParams::doi_onsager(), 4), Error);
  CHECK_THROWS_AS(make_potential(ModelParams::custom_coefficients({}), 64), Error);
  CHECK_THROWS_AS(parse_model("mystery"), Error);
}

TEST_CASE("bessel values") {
  CHECK(bessel_i(0, 0.0) == 1.0);
  for (int l = 1; l < 5; ++l) CHECK(bessel_i(l, 0.0) == 0.0);
  // I_1(1) pinned by the series oracle with its remainder bound
  const long double i11 = testsupport::bessel_series_30(1, 1.0L);
  CHECK(testsupport::bessel_series_30_remainder(1, 1.0L) < 1e-40L);
  CHECK(std::abs(bessel_i(1, 1.0) - 0.565159103992485) < 1e-15);
  CHECK(std::abs(bessel_i(1, 1.0) - static_cast<double>(i11)) < 1e-15);
  for (double x : {0.1, 0.7, 2.0, 5.0, 9.0})
    for (int l = 0; l <= 12; ++l) {
      const double ref = static_cast<double>(testsupport::bessel_series_30(l, x));
      CHECK(std::abs(bessel_i(l, x) - ref) <= 1e-14 * ref + 1e-300);
    }
  const Vec seq = bessel_i_sequence(20, 3.0);
  for (int l = 0; l <= 20; ++l) CHECK(std::abs(seq[l] - bessel_i(l, 3.0)) <= 1e-13 * bessel_i(l, 3.0));
  CHECK_THROWS_AS(bessel_i(1, 51.0), Error);
  CHECK_THROWS_AS(bessel_i(-1, 1.0), Error);
}

TEST_CASE("thresholds") {
  const double bs = beta_star();
  CHECK(std::abs(bs - 2.447) <= 2e-3);
  CHECK(std::abs(bessel_i(2, bs) - 0.5 * bessel_i(1, bs)) <= 1e-10);
  const double rs = r_star();
  CHECK(std::abs(rs - 2.139) <= 2e-3);
  CHECK(std::abs(rs - std::sin(rs) * (2.0 - std::cos(rs))) < 1e-12);
}

TEST_CASE("k_sharp") {
  const KSharp doi = k_sharp(make_potential(ModelParams::doi_onsager(), 128));
  CHECK(std::abs(doi.value - 3.0 * kPi / 4.0) < 1e-13);
  CHECK(doi.mode == 2);
  CHECK(doi.certified);
  for (double beta : {0.5, 1.0, 3.0}) {
    const KSharp t = k_sharp(make_potential(ModelParams::transformer(beta), 128));
    CHECK(std::abs(t.value - beta / (2.0 * bessel_i(1, beta))) < 1e-13);
    CHECK(t.mode == 1);
  }
  const KSharp hk = k_sharp(make_potential(ModelParams::hegselmann_krause(2.5), 128));
  CHECK(std::abs(hk.value - kPi / (4.0 * (2.5 - std::sin(2.5)))) < 1e-13);
  CHECK(std::abs(hk.value - 0.4130) < 1e-4);
  CHECK(hk.mode == 1);
  CHECK_THROWS_AS(k_sharp(make_potential(ModelParams::custom_coefficients({-1.0, -0.5}), 8)), Error);
}

TEST_CASE("decay condition") {
  const DecayReport doi = check_decay(make_potential(ModelParams::doi_onsager(), 128), 1);
  CHECK(doi.passed);
  CHECK(doi.equality_modes == 0);

  const DecayReport tr = check_decay(make_potential(ModelParams::transformer(3.0), 128), 0);
  CHECK_FALSE(tr.passed);
  REQUIRE(tr.first_violation.has_value());
  CHECK(*tr.first_violation == 2);

  const DecayReport lg = check_decay(make_potential(ModelParams::log_gas(), 128), 0);
  CHECK(lg.passed);
  CHECK(std::abs(lg.min_margin) < 1e-12);
  CHECK(lg.equality_modes == 127);

  CHECK_THROWS_AS(check_decay(make_potential(ModelParams::transformer(1.0), 64), 1), Error);
  CHECK_THROWS_AS(check_decay(make_potential(ModelParams::custom_coefficients({0.0, 0.0, 0.3}), 16), 0), Error);
}

TEST_CASE("normalize") {
  const Normalized doi = normalize(make_potential(ModelParams::doi_onsager(), 128), 1);
  CHECK(std::abs(doi.scale - 4.0 / (3.0 * kPi)) < 1e-15);
  CHECK(std::abs(k_sharp(doi.potential).value - 1.0) < 1e-12);
  CHECK(std::abs(normalize(make_potential(ModelParams::log_gas(), 64), 0).scale - 1.0) < 1e-15);
  const Normalized id = normalize(make_potential(ModelParams::custom_coefficients({0.5}), 8), 0);
  CHECK(id.scale == 1.0);
  CHECK(id.potential.coeff(1) == 0.5);
}

TEST_CASE("normalized k_sharp is one whenever the decay condition passes") {
  std::vector<std::pair<ModelParams, int>> cases = {{ModelParams::doi_onsager(), 1}, {ModelParams::log_gas(), 0}};
  for (double b : {0.3, 1.0, 2.0, 2.4}) cases.push_back({ModelParams::transformer(b), 0});
  for (double r : {2.2, 2.5, 3.0, kPi}) cases.push_back({ModelParams::hegselmann_krause(r), 0});
  for (const auto& [p, n] : cases) {
    const Potential w = make_potential(p, 128);
    REQUIRE(check_decay(w, n).passed);
    CHECK(std::abs(k_sharp(normalize(w, n).potential).value - 1.0) < 1e-12);
  }
}

TEST_CASE("closed forms agree with the truncated series within the tail bound") {
  const ModelParams models[] = {ModelParams::doi_onsager(), ModelParams::transformer(2.0),
                                ModelParams::hegselmann_krause(1.2), ModelParams::hegselmann_krause(2.8)};
  for (const ModelParams& p : models) {
    const Potential w = make_potential(p, 256);
    const double bound = 2.0 * w.tail_bound(256) + 1e-12;
    double worst = 0.0;
    for (Index j = 0; j < 1024; ++j) {
      const double t = grid_point(j, 1024);
      worst = std::max(worst, std::abs(w.value(t) - w.series_value(t)));
    }
    CHECK(worst <= bound);
  }
}

TEST_CASE("bessel decay below and at beta_star") {
  for (double beta : {0.5, 1.0, 2.0, beta_star()}) {
    const double i1 = bessel_i(1, beta);
    for (int l = 1; l <= 30; ++l) {
      CHECK(bessel_i(l, beta) <= i1 / l * (1.0 + 1e-14));
      if (l >= 3) CHECK(bessel_i(l, beta) < i1 / l);
    }
  }
}

TEST_CASE("hegselmann-krause coefficient properties") {
  for (int i = 1; i <= 100; ++i) {
    const Potential w = make_potential(ModelParams::hegselmann_krause(kPi * i / 100.0), 64);
    for (Index l = 1; l <= 50; ++l) CHECK(w.coeff(l) <= w.coeff(1) * (1.0 + 1e-14));
  }
  for (double r : {r_star(), 2.5, 3.0}) {
    const Potential w = make_potential(ModelParams::hegselmann_krause(r), 64);
    for (Index l = 1; l <= 50; ++l) {
      CHECK(w.coeff(l) <= w.coeff(1) / static_cast<double>(l) + 1e-15);
      if (l >= 3) CHECK(w.coeff(l) < w.coeff(1) / static_cast<double>(l));
    }
  }
  const DecayReport below = check_decay(make_potential(ModelParams::hegselmann_krause(1.0), 64), 0);
  CHECK_FALSE(below.passed);
  CHECK(below.first_violation.value_or(0) == 2);
}

TEST_CASE("potential json round trip") {
  const Potential w = potential_from_spec_json(potential_spec_to_json(ModelParams::transformer(2.5), 96));
  CHECK(w.model() == Model::Transformer);
  CHECK(w.truncation() == 96);
  CHECK(w.params().beta == 2.5);
  CHECK_THROWS_AS(potential_from_spec_json("{\"model\": 3}"), Error);
}

}
