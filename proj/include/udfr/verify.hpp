// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "udfr/density.hpp"

namespace udfr {

// Numerical quadrature along a ray that hits a planar surface at t0 with
// incidence angle theta between the UDF gradient and the ray direction, so
// f(t) = |t - t0| * |cos(theta)|. These routines integrate the density
// numerically (trapezoidal transmittance) and are the independent check of
// the closed forms in density.hpp.

struct PlanarProfile {
  std::vector<double> t;
  std::vector<double> w;      // T(t) * sigma(t) on the grid
  std::vector<double> trans;  // T(t)
  std::size_t peak_index = 0;
  double spacing = 0.0;
};

// Modified density when c > 0 is given; theoretical density when c <= 0.
PlanarProfile planar_weight_profile(double s, double cos_theta, double c,
                                    double t0, double t_max, int n);

// exp(-integral of the theoretical density) for a perpendicular ray whose
// distance falls linearly from f0 to ft; `steps` trapezoid intervals.
double planar_transparency_quadrature(double f0, double ft, double s,
                                      int steps);

// exp(-integral of the modified density) across the full crossing
// f(t) = |1 - t|, t in [0, 2].
double crossing_transparency_quadrature(const DensityParams& params,
                                        int steps);

// Weight mass assigned to each of two parallel planes (nearest-plane split)
// for a perpendicular ray under the modified density.
struct TwoPlaneMass {
  double first = 0.0;
  double second = 0.0;
};
TwoPlaneMass two_plane_weight_mass(const DensityParams& params, double t0_a,
                                   double t0_b, double t_max, int n);

// One row of the verification table written by the CLI `verify` command.
struct VerifyRow {
  std::string claim;
  double computed = 0.0;
  std::string reference;
  bool pass = false;
};

// Runs the density/sampling claim suite with the given parameters (c and s
// come from the caller so miswired constants are caught by the paper-pinned
// rows).
std::vector<VerifyRow> run_verification(const DensityParams& params);

}  // namespace udfr
