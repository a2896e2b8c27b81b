// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace udfr {

// Parameters of the distance-to-density mapping. s is the learnable
// sharpness (models live in a unit sphere, so it is unitless); c > 1 is the
// constant that replaces |cos(theta)| in the opaque variant; beta is the
// softplus sharpness of the non-negativity head.
struct DensityParams {
  double s = 1000.0;
  double c = 5.0;
  double beta = 100.0;

  void validate() const {
    if (s <= 0.0) throw std::invalid_argument("DensityParams: s must be > 0");
    if (c <= 1.0) throw std::invalid_argument("DensityParams: c must be > 1");
    if (beta <= 0.0)
      throw std::invalid_argument("DensityParams: beta must be > 0");
  }
};

// e^{-u} / (1 + e^{-u}), overflow-safe for any u.
double logistic_tail(double u);

// Bell-shaped density  sigma(f) = s * e^{-s f} / (1 + e^{-s f}) * |cos(theta)|.
// Weights built from it peak exactly on the surface.
double theoretical_density(double f, double cos_theta, double s);

// Opaque variant  sigma_hat(f) = c * s * e^{-s f} / (1 + e^{-s f}).
// Strictly decreasing in f, maximum c*s/2 at f = 0.
double modified_density(double f, const DensityParams& params);

// Logistic density  phi_s(x) = s e^{-s x} / (1 + e^{-s x})^2 — the S-density
// baseline used by signed-distance renderers; symmetric in x.
double neus_logistic_density(double x, double s);

// Closed-form transmittance along the front side of a planar occluder under
// the theoretical density:  T = (1 + e^{-s f0}) / (1 + e^{-s ft}).
double planar_transparency(double f0, double ft, double s);

// Distance value at which the weight under the modified density peaks, for a
// ray approaching a planar surface at angle theta (cos_theta < 0):
//   f(t*) = ln(-c / cos_theta) / s.
double max_weight_offset(const DensityParams& params, double cos_theta);

// Residual transmittance of a perpendicular ray that fully crosses a planar
// surface starting from unit distance:  ((1 + e^{-s}) / 2)^{2c}.
double perpendicular_pass_transparency(const DensityParams& params);

}  // namespace udfr
