// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "udfr/density.hpp"
#include "udfr/rng.hpp"
#include "udfr/verify.hpp"

using namespace udfr;

namespace {
const DensityParams kDefault{1000.0, 5.0, 100.0};
}

TEST_CASE("theoretical density: frozen values") {
  CHECK(theoretical_density(0.0, -1.0, 1000.0) == doctest::Approx(500.0));
  CHECK(theoretical_density(0.37, 0.0, 800.0) == 0.0);  // grazing ray
  CHECK(theoretical_density(0.001, 1.0, 1000.0) ==
        doctest::Approx(268.94142136999512).epsilon(1e-12));
  CHECK_THROWS_AS(theoretical_density(0.1, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("modified density: frozen values and stability") {
  CHECK(modified_density(0.0, kDefault) == doctest::Approx(2500.0));
  CHECK(modified_density(1.0, kDefault) == 0.0);  // s*f = 1000, no overflow
  CHECK(std::isfinite(modified_density(5000.0, kDefault)));
  CHECK(modified_density(0.002, kDefault) ==
        doctest::Approx(596.01461011058778).epsilon(1e-12));
  DensityParams bad = kDefault;
  bad.c = 1.0;
  CHECK_THROWS_AS(modified_density(0.1, bad), std::invalid_argument);
}

TEST_CASE("logistic baseline: symmetry and frozen values") {
  CHECK(neus_logistic_density(0.0, 1000.0) == doctest::Approx(250.0));
  CHECK(neus_logistic_density(0.001, 1000.0) ==
        doctest::Approx(196.61193324148185).epsilon(1e-12));
  Rng rng = make_rng(2, 0);
  for (int i = 0; i < 200; ++i) {
    const double x = 0.02 * (uniform01(rng) - 0.5);
    CHECK(neus_logistic_density(x, 1000.0) ==
          doctest::Approx(neus_logistic_density(-x, 1000.0)).epsilon(1e-14));
  }
}

TEST_CASE("planar transparency: closed form") {
  CHECK(planar_transparency(0.4, 0.4, 1500.0) == 1.0);
  CHECK(planar_transparency(1.0, 0.0, 1000.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("planar transparency: matches an independent quadrature") {
  Rng rng = make_rng(3, 0);
  for (int trial = 0; trial < 12; ++trial) {
    const double s = 100.0 + 1900.0 * uniform01(rng);
    const double f0 = 0.1 + uniform01(rng);
    const double ft = uniform01(rng) * f0;
    // perpendicular ray: f(u) = f0 - u until it reaches ft
    const double quad = oracles::trapezoid_transparency(
        [&](double u) {
          const double f = f0 - u;
          return theoretical_density(f, -1.0, s);
        },
        0.0, f0 - ft, 100000);
    CHECK(oracles::rel_err(quad, planar_transparency(f0, ft, s)) < 1e-4);
  }
}

TEST_CASE("max weight offset: frozen values") {
  CHECK(max_weight_offset(kDefault, -1.0) ==
        doctest::Approx(0.0016094379124341004).epsilon(1e-12));
  const double cos91 = std::cos(91.0 * M_PI / 180.0);
  CHECK(max_weight_offset(kDefault, cos91) ==
        doctest::Approx(0.0056577156475603948).epsilon(1e-12));
  DensityParams s2000 = kDefault;
  s2000.s = 2000.0;
  CHECK(max_weight_offset(s2000, -1.0) ==
        doctest::Approx(0.00080471895621705019).epsilon(1e-12));
  CHECK(max_weight_offset(s2000, -1.0) ==
        doctest::Approx(0.5 * max_weight_offset(kDefault, -1.0)));
  CHECK_THROWS_AS(max_weight_offset(kDefault, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(max_weight_offset(kDefault, 0.3), std::invalid_argument);
}

TEST_CASE("perpendicular pass transparency") {
  const double ppt = perpendicular_pass_transparency(kDefault);
  CHECK(ppt == doctest::Approx(0.0009765625).epsilon(1e-12));
  CHECK(ppt < 1e-3);
  CHECK(ppt > 9.5e-4);
  // monotone decreasing in c
  double prev = ppt;
  for (double c : {6.0, 8.0, 12.0, 20.0}) {
    DensityParams p = kDefault;
    p.c = c;
    const double cur = perpendicular_pass_transparency(p);
    CHECK(cur < prev);
    prev = cur;
  }
  // against quadrature of the full crossing
  const double quad = oracles::trapezoid_transparency(
      [&](double t) { return modified_density(std::abs(1.0 - t), kDefault); },
      0.0, 2.0, 1000000);
  CHECK(oracles::rel_err(quad, ppt) < 1e-3);
}

TEST_CASE("densities are strictly decreasing in f") {
  Rng rng = make_rng(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const double s = 50.0 + 1950.0 * uniform01(rng);
    const double f1 = 0.02 * uniform01(rng);
    const double f2 = f1 + 1e-5 + 0.02 * uniform01(rng);
    DensityParams p{s, 5.0, 100.0};
    CHECK(modified_density(f2, p) < modified_density(f1, p));
    CHECK(theoretical_density(f2, -0.8, s) < theoretical_density(f1, -0.8, s));
  }
}

TEST_CASE("modified / theoretical ratio is exactly c") {
  Rng rng = make_rng(7, 0);
  for (int i = 0; i < 500; ++i) {
    const double s = 100.0 + 1900.0 * uniform01(rng);
    const double f = 0.01 * uniform01(rng);
    const double c = 1.5 + 8.0 * uniform01(rng);
    const DensityParams p{s, c, 100.0};
    const double theo = theoretical_density(f, -1.0, s);
    if (theo == 0.0) continue;
    CHECK(modified_density(f, p) / theo == doctest::Approx(c).epsilon(1e-14));
  }
}

TEST_CASE("theorem: weight peak sits on the surface (quadrature)") {
  for (double s : {100.0, 500.0, 1000.0, 2000.0}) {
    for (double theta_deg : {180.0, 135.0, 110.0}) {
      const double ct = std::cos(theta_deg * M_PI / 180.0);
      const auto prof = planar_weight_profile(s, ct, -1.0, 1.0, 2.0, 10000);
      CHECK(std::abs(prof.t[prof.peak_index] - 1.0) <= prof.spacing + 1e-15);
    }
  }
}

TEST_CASE("bias: located peak matches the closed-form offset") {
  for (double s : {1000.0, 2000.0}) {
    for (double theta_deg : {91.0, 120.0, 150.0, 180.0}) {
      const double ct = std::cos(theta_deg * M_PI / 180.0);
      const auto prof = planar_weight_profile(s, ct, 5.0, 1.0, 2.0, 500000);
      const double f_peak = std::abs(prof.t[prof.peak_index] - 1.0) * std::abs(ct);
      const double expected = max_weight_offset({s, 5.0, 100.0}, ct);
      CHECK(oracles::rel_err(f_peak, expected) <= 0.02);
    }
  }
}

TEST_CASE("bias bracket for c=5, s=1000 covers the reported range") {
  const double lo = max_weight_offset(kDefault, std::cos(M_PI));
  const double hi = max_weight_offset(kDefault, std::cos(91.0 * M_PI / 180.0));
  CHECK(lo == doctest::Approx(0.00161).epsilon(5e-3));
  CHECK(hi == doctest::Approx(0.00566).epsilon(5e-3));
  // every angle in between stays inside the bracket
  for (double theta_deg = 91.0; theta_deg <= 180.0; theta_deg += 1.0) {
    const double off =
        max_weight_offset(kDefault, std::cos(theta_deg * M_PI / 180.0));
    CHECK(off >= lo - 1e-15);
    CHECK(off <= hi + 1e-15);
  }
}

TEST_CASE("occlusion: two parallel planes") {
  const auto mass = two_plane_weight_mass(kDefault, 1.0, 1.4, 2.4, 400000);
  const double ppt = perpendicular_pass_transparency(kDefault);
  CHECK(mass.first > 1.0 - 10.0 * ppt);
  CHECK(mass.second < 0.01);
}

TEST_CASE("density params validation") {
  CHECK_THROWS_AS(DensityParams{-1.0, 5.0, 100.0}.validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(DensityParams{1000.0, 0.5, 100.0}.validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(kDefault.validate());
}
