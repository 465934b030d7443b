#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "zgt2/error.hpp"
#include "zgt2/inference.hpp"
#include "zgt2/membership.hpp"

using namespace zgt2;
using doctest::Approx;

TEST_SUITE("membership") {

TEST_CASE("PMF peak and analytic values") {
  CHECK(eval_pmf_scaled(0.3, 0.3, 2.0, 7) == 1.0);
  CHECK(eval_pmf_scaled(1.0, 0.0, 1.0, 1) == Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(eval_pmf_scaled(1.0, 0.0, 1.0, 1) == Approx(0.60653).epsilon(1e-5));
  CHECK(eval_pmf_scaled(1.0, 0.0, 1.0, 4) == Approx(std::exp(-1.0 / 8.0)).epsilon(1e-15));
  CHECK(eval_pmf_scaled(1.0, 0.0, 1.0, 4) == Approx(0.88250).epsilon(1e-5));
}

TEST_CASE("non-positive sigma is a domain error") {
  CHECK_THROWS_AS(eval_pmf_scaled(0.0, 0.0, 0.0, 1), ParameterDomainError);
  CHECK_THROWS_AS(eval_pmf_scaled(0.0, 0.0, -1.0, 1), ParameterDomainError);
}

TEST_CASE("alpha_0 radius is the exact value") {
  CHECK(kAlphaFloorRadius == Approx(3.03485).epsilon(1e-5));
  CHECK(kAlphaFloorRadius == std::sqrt(-2.0 * std::log(0.01)));
  CHECK(kAlphaFloorRadius != 3.0);
}

TEST_CASE("Zadeh alpha-cut examples") {
  auto b = zadeh_alpha_bounds(0.7, 0.1, 0.05, 1.0);
  CHECK(b.lower == 0.7);
  CHECK(b.upper == 0.7);

  b = zadeh_alpha_bounds(0.6, 0.1, 0.05, 0.01);
  CHECK(b.lower == Approx(0.29652).epsilon(1e-5));
  CHECK(b.upper == Approx(0.75174).epsilon(1e-5));

  for (double a : {0.01, 0.3, 1.0}) {
    b = zadeh_alpha_bounds(0.5, 0.0, 0.0, a);
    CHECK(b.lower == 0.5);
    CHECK(b.upper == 0.5);
  }
}

TEST_CASE("alpha levels below the floor are rejected") {
  CHECK_THROWS_AS(zadeh_alpha_bounds(0.5, 0.1, 0.1, 0.0), ParameterDomainError);
  CHECK_THROWS_AS(zadeh_alpha_bounds(0.5, 0.1, 0.1, -0.2), ParameterDomainError);
  CHECK_THROWS_AS(zadeh_alpha_bounds(0.5, 0.1, 0.1, 0.005), ParameterDomainError);
  CHECK_THROWS_AS(zadeh_alpha_bounds(0.5, 0.1, 0.1, 1.5), ParameterDomainError);
  CHECK_NOTHROW(zadeh_alpha_bounds(0.5, 0.1, 0.1, 0.01));
}

TEST_CASE("SMF examples") {
  CHECK(eval_smf(0.42, 0.42, 0.1, 0.2) == 1.0);
  const double u = 0.6 - 0.1 * std::sqrt(-2.0 * std::log(0.5));
  CHECK(eval_smf(u, 0.6, 0.1, 0.05) == Approx(0.5).epsilon(1e-12));
  CHECK(eval_smf(0.29652, 0.6, 0.1, 0.05) == Approx(0.01).epsilon(1e-3));
  // Point mass on a zero-width side.
  CHECK(eval_smf(0.4, 0.5, 0.0, 0.1) == 0.0);
  CHECK(eval_smf(0.5, 0.5, 0.0, 0.0) == 1.0);
}

TEST_CASE("alpha-cut round trip") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double g = rng.uniform(0.05, 0.95);
    const double sl = rng.uniform(1e-3, g / kAlphaFloorRadius);
    const double sr = rng.uniform(1e-3, (1.0 - g) / kAlphaFloorRadius);
    const double a = rng.uniform(0.01, 1.0);
    const auto b = zadeh_alpha_bounds(g, sl, sr, a);
    CHECK(std::abs(eval_smf(b.lower, g, sl, sr) - a) < 1e-12);
    CHECK(std::abs(eval_smf(b.upper, g, sl, sr) - a) < 1e-12);
  }
}

TEST_CASE("trick-derived SMF deviations keep cuts in [0,1]") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double g = rng.uniform();
    const auto s = zadeh_smf_sigmas(g, rng.uniform(), rng.uniform());
    const auto b = zadeh_alpha_bounds(g, s.lower, s.upper, 0.01);
    CHECK(b.lower >= -1e-15);
    CHECK(b.upper <= 1.0 + 1e-15);
  }
  // sig(0) = 0.5 at gamma = 0.5.
  CHECK(zadeh_smf_sigmas(0.5, 0.5, 0.5).lower == Approx(0.08238).epsilon(1e-4));
}

TEST_CASE("MJ PMF examples") {
  MJAntecedentDim d;
  d.center = 0.0;
  d.height = 0.5;
  auto b = mj_pmf_bounds(0.0, d, 1);
  CHECK(b.lower == 0.5);
  CHECK(b.upper == 1.0);

  d.height = 1.0;
  b = mj_pmf_bounds(0.0, d, 3);
  CHECK(b.lower == 1.0);
  CHECK(b.upper == 1.0);

  d.sigma_lower = 0.5;
  d.sigma_upper = 1.0;
  d.height = 0.8;
  b = mj_pmf_bounds(1.0, d, 1);
  CHECK(b.lower == Approx(0.8 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(b.lower == Approx(0.10827).epsilon(1e-4));
  CHECK(b.upper == Approx(0.60653).epsilon(1e-5));
}

TEST_CASE("MJ ordering violations are domain errors") {
  MJAntecedentDim d;
  d.sigma_lower = 2.0;
  d.sigma_upper = 1.0;
  CHECK_THROWS_AS(mj_pmf_bounds(0.0, d, 1), ParameterDomainError);
  d.sigma_lower = 1.0;
  d.height = 1.5;
  CHECK_THROWS_AS(mj_pmf_bounds(0.0, d, 1), ParameterDomainError);
  CHECK_THROWS_AS(mj_alpha_bounds(0.2, 0.8, 0.5, 1.2, 0.6), ParameterDomainError);
  CHECK_THROWS_AS(mj_alpha_bounds(0.9, 0.8, 0.5, 0.2, 0.6), ParameterDomainError);
}

TEST_CASE("MJ planes invert when delta1 exceeds delta2") {
  // alpha (1 + delta1 - delta2) > 1 puts the LMF above the UMF.
  CHECK_THROWS_AS(mj_alpha_bounds(0.2, 0.8, 1.0, 0.6, 0.4), ParameterDomainError);
  CHECK_NOTHROW(mj_alpha_bounds(0.2, 0.8, 0.8, 0.6, 0.4));
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double d1 = rng.uniform(), d2 = d1 + (1.0 - d1) * rng.uniform();
    const auto b = mj_alpha_bounds(0.1, 0.9, 1.0, d1, d2);
    CHECK(b.lower <= b.upper);
  }
}

TEST_CASE("MJ alpha-plane examples") {
  auto b = mj_alpha_bounds(0.2, 0.8, 0.0, 0.7, 0.1);
  CHECK(b.lower == 0.2);
  CHECK(b.upper == 0.8);
  b = mj_alpha_bounds(0.2, 0.8, 1.0, 0.5, 0.5);
  CHECK(b.lower == Approx(0.5).epsilon(1e-15));
  CHECK(b.upper == Approx(0.5).epsilon(1e-15));
  b = mj_alpha_bounds(0.2, 0.8, 0.5, 0.6, 0.4);
  CHECK(b.lower == Approx(0.38).epsilon(1e-14));
  CHECK(b.upper == Approx(0.62).epsilon(1e-14));
}

TEST_CASE("nesting across alpha levels, both families") {
  Rng rng(21);
  for (int i = 0; i < 1000; ++i) {
    const double g = rng.uniform();
    const auto s = zadeh_smf_sigmas(g, rng.uniform(), rng.uniform());
    double a1 = rng.uniform(0.01, 1.0), a2 = rng.uniform(0.01, 1.0);
    if (a1 > a2) std::swap(a1, a2);
    const auto z1 = zadeh_alpha_bounds(g, s.lower, s.upper, a1);
    const auto z2 = zadeh_alpha_bounds(g, s.lower, s.upper, a2);
    CHECK(z1.lower <= z2.lower + 1e-12);
    CHECK(z2.lower <= z2.upper + 1e-12);
    CHECK(z2.upper <= z1.upper + 1e-12);

    const double umf0 = rng.uniform(), lmf0 = umf0 * rng.uniform();
    const double d1 = rng.uniform(), d2 = d1 + (1.0 - d1) * rng.uniform();
    const auto m1 = mj_alpha_bounds(lmf0, umf0, a1, d1, d2);
    const auto m2 = mj_alpha_bounds(lmf0, umf0, a2, d1, d2);
    CHECK(m1.lower <= m2.lower + 1e-12);
    CHECK(m2.lower <= m2.upper + 1e-12);
    CHECK(m2.upper <= m1.upper + 1e-12);
    CHECK(m1.lower >= 0.0);
    CHECK(m1.upper <= 1.0);
  }
}

TEST_CASE("type-1 collapse") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double g = rng.uniform();
    for (double a : {0.01, 0.25, 0.5, 1.0}) {
      const auto b = zadeh_alpha_bounds(g, 0.0, 0.0, a);
      CHECK(b.lower == b.upper);
    }
    MJAntecedentDim d;
    d.center = rng.normal();
    d.height = 1.0;
    d.delta1 = d.delta2 = 0.3;
    const auto p = mj_pmf_bounds(rng.normal(), d, 2);
    const auto top = mj_alpha_bounds(p.lower, p.upper, 1.0, d.delta1, d.delta2);
    CHECK(top.lower == top.upper);
  }
}

TEST_CASE("HTSK scaling equals the M-th root of the unscaled Gaussian") {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal(), c = rng.normal(), s = rng.uniform(0.2, 3.0);
    const int M = 1 + static_cast<int>(rng.below(30));
    CHECK(eval_pmf_scaled(x, c, s, M) ==
          Approx(std::pow(eval_pmf_scaled(x, c, s, 1), 1.0 / M)).epsilon(1e-12));
  }
}

TEST_CASE("alpha grid") {
  const auto g = AlphaPlaneGrid::uniform(2);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == 0.01);
  CHECK(g[1] == 0.5);
  CHECK(g[2] == 1.0);
  CHECK(g.weight_sum() == Approx(1.51));
  const auto one = AlphaPlaneGrid::single_plane();
  REQUIRE(one.size() == 1);
  CHECK(one[0] == 1.0);
  CHECK_THROWS(AlphaPlaneGrid::uniform(0));
}

}  // TEST_SUITE
