// SPDX-License-Identifier: Apache-2.0
#include "udfr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "udfr/rng.hpp"
#include "udfr/sampling.hpp"

namespace udfr {

PlanarProfile planar_weight_profile(double s, double cos_theta, double c,
                                    double t0, double t_max, int n) {
  PlanarProfile prof;
  prof.t.resize(n);
  prof.w.resize(n);
  prof.trans.resize(n);
  prof.spacing = t_max / (n - 1);
  const double abs_cos = std::abs(cos_theta);

  const auto sigma_at = [&](double t) {
    const double f = std::abs(t - t0) * abs_cos;
    if (c > 0.0) return c * s * logistic_tail(s * f);
    return theoretical_density(f, abs_cos, s);
  };

  double integral = 0.0;
  double prev_sigma = sigma_at(0.0);
  prof.t[0] = 0.0;
  prof.trans[0] = 1.0;
  prof.w[0] = prev_sigma;
  for (int i = 1; i < n; ++i) {
    const double t = i * prof.spacing;
    const double sig = sigma_at(t);
    integral += 0.5 * (prev_sigma + sig) * prof.spacing;
    prev_sigma = sig;
    prof.t[i] = t;
    prof.trans[i] = std::exp(-integral);
    prof.w[i] = prof.trans[i] * sig;
  }
  prof.peak_index =
      std::max_element(prof.w.begin(), prof.w.end()) - prof.w.begin();
  return prof;
}

double planar_transparency_quadrature(double f0, double ft, double s,
                                      int steps) {
  // perpendicular ray: f falls linearly from f0 to ft over length f0 - ft
  const double len = f0 - ft;
  if (len <= 0.0) return 1.0;
  const double h = len / steps;
  double integral = 0.0;
  double prev = s * logistic_tail(s * f0);
  for (int i = 1; i <= steps; ++i) {
    const double f = f0 - i * h;
    const double sig = s * logistic_tail(s * f);
    integral += 0.5 * (prev + sig) * h;
    prev = sig;
  }
  return std::exp(-integral);
}

double crossing_transparency_quadrature(const DensityParams& params,
                                        int steps) {
  const double h = 2.0 / steps;
  double integral = 0.0;
  double prev = modified_density(1.0, params);
  for (int i = 1; i <= steps; ++i) {
    const double f = std::abs(1.0 - i * h);
    const double sig = modified_density(f, params);
    integral += 0.5 * (prev + sig) * h;
    prev = sig;
  }
  return std::exp(-integral);
}

TwoPlaneMass two_plane_weight_mass(const DensityParams& params, double t0_a,
                                   double t0_b, double t_max, int n) {
  const double h = t_max / (n - 1);
  const double mid = 0.5 * (t0_a + t0_b);
  TwoPlaneMass mass;
  double integral = 0.0;
  double prev_sigma = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = i * h;
    const double f = std::min(std::abs(t - t0_a), std::abs(t - t0_b));
    const double sig = modified_density(f, params);
    if (i > 0) integral += 0.5 * (prev_sigma + sig) * h;
    prev_sigma = sig;
    const double w = std::exp(-integral) * sig * h;
    (t < mid ? mass.first : mass.second) += w;
  }
  return mass;
}

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

std::vector<VerifyRow> run_verification(const DensityParams& params) {
  params.validate();
  std::vector<VerifyRow> rows;
  const double t0 = 1.0;

  // Theorem: under the theoretical density the weight peaks on the surface.
  for (double s : {100.0, 500.0, 1000.0, 2000.0}) {
    for (double theta_deg : {180.0, 135.0}) {
      const double ct = std::cos(theta_deg * M_PI / 180.0);
      const PlanarProfile prof =
          planar_weight_profile(s, ct, -1.0, t0, 2.0, 10000);
      const double miss = std::abs(prof.t[prof.peak_index] - t0);
      VerifyRow row;
      row.claim = "unbiased_peak_s" + std::to_string(int(s)) + "_theta" +
                  std::to_string(int(theta_deg));
      row.computed = miss;
      row.reference = "<= " + fmt(prof.spacing) + " (one sample spacing)";
      row.pass = miss <= prof.spacing + 1e-15;
      rows.push_back(row);
    }
  }

  // Bias of the modified density: located peak matches the closed form.
  for (double s : {1000.0, 2000.0}) {
    for (double theta_deg : {91.0, 120.0, 150.0, 180.0}) {
      const double ct = std::cos(theta_deg * M_PI / 180.0);
      const PlanarProfile prof =
          planar_weight_profile(s, ct, params.c, t0, 2.0, 2000000);
      const double f_peak =
          std::abs(prof.t[prof.peak_index] - t0) * std::abs(ct);
      const double expected = max_weight_offset({s, params.c, params.beta}, ct);
      const double rel = std::abs(f_peak - expected) / expected;
      VerifyRow row;
      row.claim = "bias_formula_s" + std::to_string(int(s)) + "_theta" +
                  std::to_string(int(theta_deg));
      row.computed = f_peak;
      row.reference = "ln(-c/cos)/s = " + fmt(expected) + " (rel 2%)";
      row.pass = rel <= 0.02;
      rows.push_back(row);
    }
  }

  // Paper-pinned bias bracket for c=5, s=1000 (3-significant-figure bounds).
  {
    const double lo = max_weight_offset(
        {1000.0, params.c, params.beta}, std::cos(M_PI));
    const double hi = max_weight_offset(
        {1000.0, params.c, params.beta}, std::cos(91.0 * M_PI / 180.0));
    VerifyRow row_lo{"bias_offset_theta180_s1000", lo,
                     "in [0.001605, 0.001615]",
                     lo >= 0.001605 && lo <= 0.001615};
    VerifyRow row_hi{"bias_offset_theta91_s1000", hi,
                     "in [0.005655, 0.005665]",
                     hi >= 0.005655 && hi <= 0.005665};
    rows.push_back(row_lo);
    rows.push_back(row_hi);
    VerifyRow scaling;
    scaling.claim = "bias_offset_halves_when_s_doubles";
    scaling.computed =
        max_weight_offset({2000.0, params.c, params.beta}, -1.0) /
        max_weight_offset({1000.0, params.c, params.beta}, -1.0);
    scaling.reference = "0.5";
    scaling.pass = std::abs(scaling.computed - 0.5) < 1e-12;
    rows.push_back(scaling);
  }

  // Opacity of the full perpendicular crossing.
  {
    const DensityParams p1000{1000.0, params.c, params.beta};
    const double ppt = perpendicular_pass_transparency(p1000);
    VerifyRow row{"pass_transparency_s1000", ppt, "in (9.5e-4, 1e-3)",
                  ppt > 9.5e-4 && ppt < 1e-3};
    rows.push_back(row);

    const double quad = crossing_transparency_quadrature(p1000, 1000000);
    const double rel = std::abs(quad - ppt) / ppt;
    VerifyRow qrow{"pass_transparency_quadrature", quad,
                   "closed form " + fmt(ppt) + " (rel 1e-3)", rel <= 1e-3};
    rows.push_back(qrow);
  }

  // Closed-form planar transparency against trapezoid quadrature.
  {
    Rng rng = make_rng(7, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const double s = 100.0 + 1900.0 * uniform01(rng);
      const double f0 = 0.2 + 1.0 * uniform01(rng);
      const double ft = uniform01(rng) * f0 * 0.9;
      const double closed = planar_transparency(f0, ft, s);
      const double quad = planar_transparency_quadrature(f0, ft, s, 100000);
      worst = std::max(worst, std::abs(quad - closed) / closed);
    }
    VerifyRow row{"planar_transparency_vs_quadrature_20trials", worst,
                  "max rel err <= 1e-4", worst <= 1e-4};
    rows.push_back(row);
  }

  // Occlusion: two parallel planes, nearly all mass on the first.
  {
    const TwoPlaneMass mass =
        two_plane_weight_mass(params, 1.0, 1.4, 2.4, 400000);
    const double ppt = perpendicular_pass_transparency(params);
    VerifyRow first{"occlusion_first_plane_mass", mass.first,
                    "> " + fmt(1.0 - 10.0 * ppt),
                    mass.first > 1.0 - 10.0 * ppt};
    VerifyRow second{"occlusion_second_plane_mass", mass.second, "< 0.01",
                     mass.second < 0.01};
    rows.push_back(first);
    rows.push_back(second);
  }

  // Sampling schedule values.
  {
    VerifyRow r1{"ahs_schedule_s2000_i1", ahs_schedule(1, 4, 2000.0), "250",
                 std::abs(ahs_schedule(1, 4, 2000.0) - 250.0) < 1e-12};
    VerifyRow r4{"ahs_schedule_s2000_i4", ahs_schedule(4, 4, 2000.0), "2000",
                 std::abs(ahs_schedule(4, 4, 2000.0) - 2000.0) < 1e-12};
    rows.push_back(r1);
    rows.push_back(r4);
  }

  // Non-vanishing softplus gradient.
  {
    const double g = softplus_grad(-10.0, params.beta);
    VerifyRow row{"softplus_grad_at_minus10", g, "> 0", g > 0.0};
    rows.push_back(row);
  }

  return rows;
}

}  // namespace udfr
