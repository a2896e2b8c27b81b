// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "udfr/density.hpp"
#include "udfr/fields.hpp"
#include "udfr/geometry.hpp"
#include "udfr/rng.hpp"

namespace udfr {

// Ordered arc-length samples on one ray. t is strictly ascending inside
// [t_near, t_far]; delta[i] = t[i+1] - t[i], with the last segment capped at
// t_far. The remaining arrays are filled in by the renderer.
struct RaySamples {
  double t_near = 0.0, t_far = 0.0;
  std::vector<double> t;
  std::vector<double> delta;
  std::vector<double> f;
  std::vector<Vec3> grad;
  std::vector<double> sigma;
  std::vector<double> alpha;
  std::vector<double> trans;
  std::vector<double> w;

  std::size_t size() const { return t.size(); }
  void recompute_delta();
};

struct SamplingConfig {
  int n_uniform = 64;
  int per_iter = 16;
  int iters = 4;
  bool ahs = true;
  // replaces random draws by bin midpoints / CDF quantiles, making sampling
  // exactly reproducible for the worked examples
  bool deterministic = false;
};

// n stratified-uniform samples in [t_near, t_far]: one draw per equal-width
// bin (bin midpoints in deterministic mode).
RaySamples uniform_samples(const Ray& ray, int n, Rng& rng,
                           bool deterministic = false);

// Draws m samples by inverse CDF over the piecewise-constant distribution
// that puts weights[i] on segment [t[i], t[i]+delta[i]), then merges them
// with the input and re-sorts. All-zero weights fall back to a uniform
// distribution over the same interval. Output size = input size + m.
RaySamples importance_resample(const RaySamples& samples,
                               const std::vector<double>& weights, int m,
                               Rng& rng, bool deterministic = false);

// Sharpness used to estimate weights during sampling iteration i (1-based):
//   max(32 * 2^i, s_current / 2^{k-i}).
double ahs_schedule(int i, int k, double s_current);

// n_uniform stratified samples followed by `iters` importance passes of
// per_iter samples each. Weight estimation uses the modified density with
// sharpness ahs_schedule(i, k, s) when config.ahs is set, else the fixed
// rates 32 * 2^i. Returns samples with f populated.
RaySamples hierarchical_sample(const UdfField& field, const Ray& ray,
                               const DensityParams& params,
                               const SamplingConfig& config, Rng& rng);

}  // namespace udfr
