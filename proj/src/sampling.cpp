// SPDX-License-Identifier: Apache-2.0
#include "udfr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "udfr/render.hpp"

namespace udfr {

void RaySamples::recompute_delta() {
  const std::size_t n = t.size();
  delta.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = t[i + 1] - t[i];
  if (n > 0) delta[n - 1] = std::max(t_far - t[n - 1], 1e-12);
}

RaySamples uniform_samples(const Ray& ray, int n, Rng& rng,
                           bool deterministic) {
  if (n < 2) throw std::invalid_argument("uniform_samples: n must be >= 2");
  if (!(ray.t_near < ray.t_far))
    throw std::invalid_argument("uniform_samples: ray needs t_near < t_far");
  RaySamples rs;
  rs.t_near = ray.t_near;
  rs.t_far = ray.t_far;
  rs.t.resize(n);
  const double width = (ray.t_far - ray.t_near) / n;
  for (int i = 0; i < n; ++i) {
    const double u = deterministic ? 0.5 : uniform01(rng);
    rs.t[i] = ray.t_near + (i + u) * width;
  }
  rs.recompute_delta();
  return rs;
}

namespace {

// keeps t strictly ascending after merges; zero-width duplicates get nudged
// forward by a relative epsilon
void enforce_strictly_ascending(std::vector<double>& t, double range) {
  const double eps = std::max(range, 1.0) * 1e-13;
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] <= t[i - 1]) t[i] = t[i - 1] + eps;
}

}  // namespace

RaySamples importance_resample(const RaySamples& samples,
                               const std::vector<double>& weights, int m,
                               Rng& rng, bool deterministic) {
  const std::size_t n = samples.size();
  if (weights.size() != n)
    throw std::invalid_argument("importance_resample: weight count mismatch");
  if (m < 1) throw std::invalid_argument("importance_resample: m must be >= 1");

  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0)
      throw std::invalid_argument("importance_resample: negative weight");
    total += w;
  }

  // cumulative mass over segments [t[i], t[i] + delta[i])
  std::vector<double> cdf(n + 1, 0.0);
  if (total > 0.0) {
    for (std::size_t i = 0; i < n; ++i) cdf[i + 1] = cdf[i] + weights[i] / total;
  } else {
    // all-zero weights: uniform over the same interval
    for (std::size_t i = 0; i < n; ++i)
      cdf[i + 1] = cdf[i] + samples.delta[i];
    for (std::size_t i = 0; i <= n; ++i) cdf[i] /= cdf[n];
  }
  cdf[n] = 1.0;

  std::vector<double> fresh(m);
  for (int j = 0; j < m; ++j) {
    const double u =
        deterministic ? (j + 0.5) / m : uniform01(rng);
    // first segment whose cdf upper end exceeds u; zero-mass segments are
    // skipped, which resolves ties to the lower segment boundary
    const auto it = std::upper_bound(cdf.begin() + 1, cdf.end(), u);
    const std::size_t seg =
        std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()) - 1,
                              n - 1);
    const double mass = cdf[seg + 1] - cdf[seg];
    const double frac = mass > 0.0 ? (u - cdf[seg]) / mass : 0.0;
    fresh[j] = samples.t[seg] + frac * samples.delta[seg];
  }
  std::sort(fresh.begin(), fresh.end());

  RaySamples out;
  out.t_near = samples.t_near;
  out.t_far = samples.t_far;
  out.t.resize(n + m);
  std::merge(samples.t.begin(), samples.t.end(), fresh.begin(), fresh.end(),
             out.t.begin());
  enforce_strictly_ascending(out.t, samples.t_far - samples.t_near);
  out.recompute_delta();
  return out;
}

double ahs_schedule(int i, int k, double s_current) {
  if (i < 1 || i > k)
    throw std::invalid_argument("ahs_schedule: iteration index out of range");
  if (s_current <= 0.0)
    throw std::invalid_argument("ahs_schedule: s must be positive");
  const double fixed_rate = 32.0 * std::pow(2.0, i);
  const double adaptive = s_current / std::pow(2.0, k - i);
  return std::max(fixed_rate, adaptive);
}

RaySamples hierarchical_sample(const UdfField& field, const Ray& ray,
                               const DensityParams& params,
                               const SamplingConfig& config, Rng& rng) {
  params.validate();
  if (config.n_uniform < 2)
    throw std::invalid_argument("hierarchical_sample: n_uniform must be >= 2");
  if (config.iters < 1)
    throw std::invalid_argument("hierarchical_sample: iters must be >= 1");

  RaySamples rs = uniform_samples(ray, config.n_uniform, rng,
                                  config.deterministic);
  auto eval_f = [&](RaySamples& s) {
    s.f.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
      s.f[i] = field.eval(ray.at(s.t[i]));
  };
  eval_f(rs);

  std::vector<double> sigma, alpha, trans, weights;
  for (int iter = 1; iter <= config.iters; ++iter) {
    const double s_iter = config.ahs
                              ? ahs_schedule(iter, config.iters, params.s)
                              : 32.0 * std::pow(2.0, iter);
    const std::size_t n = rs.size();
    sigma.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      sigma[i] = params.c * s_iter * logistic_tail(s_iter * rs.f[i]);
    compute_weights(sigma, rs.delta, alpha, trans, weights);
    rs = importance_resample(rs, weights, config.per_iter, rng,
                             config.deterministic);
    eval_f(rs);
  }
  return rs;
}

}  // namespace udfr
