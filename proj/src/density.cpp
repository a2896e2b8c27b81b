// SPDX-License-Identifier: Apache-2.0
#include "udfr/density.hpp"

#include <cmath>

namespace udfr {

double logistic_tail(double u) {
  if (u >= 0.0) {
    const double e = std::exp(-u);  // <= 1, never overflows
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(u));
}

double theoretical_density(double f, double cos_theta, double s) {
  if (s <= 0.0)
    throw std::invalid_argument("theoretical_density: s must be > 0");
  return s * logistic_tail(s * f) * std::abs(cos_theta);
}

double modified_density(double f, const DensityParams& params) {
  params.validate();
  return params.c * params.s * logistic_tail(params.s * f);
}

double neus_logistic_density(double x, double s) {
  if (s <= 0.0)
    throw std::invalid_argument("neus_logistic_density: s must be > 0");
  const double e = std::exp(-s * std::abs(x));  // symmetric in x
  const double d = 1.0 + e;
  return s * e / (d * d);
}

double planar_transparency(double f0, double ft, double s) {
  return (1.0 + std::exp(-s * f0)) / (1.0 + std::exp(-s * ft));
}

double max_weight_offset(const DensityParams& params, double cos_theta) {
  params.validate();
  if (cos_theta >= 0.0)
    throw std::invalid_argument(
        "max_weight_offset: requires cos_theta < 0 (point in front of the "
        "surface)");
  return std::log(-params.c / cos_theta) / params.s;
}

double perpendicular_pass_transparency(const DensityParams& params) {
  params.validate();
  // ((1+e^{-s})/2)^{2c} via logs to stay stable for large c
  return std::exp(2.0 * params.c *
                  (std::log1p(std::exp(-params.s)) - std::log(2.0)));
}

}  // namespace udfr
