// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "udfr/sampling.hpp"

using namespace udfr;

namespace {

Ray unit_ray(double t_near, double t_far) {
  return Ray{{0, 0, 0}, {0, 0, 1}, t_near, t_far};
}

// perpendicular planar wall at z = t0 for rays along +z
class PlanarWall final : public UdfField {
 public:
  explicit PlanarWall(double t0) : t0_(t0) {}
  double eval(const Vec3& p) const override { return std::abs(p.z - t0_); }
  Vec3 gradient(const Vec3& p) const override {
    return {0, 0, p.z >= t0_ ? 1.0 : -1.0};
  }

 private:
  double t0_;
};

class ConstantField final : public UdfField {
 public:
  explicit ConstantField(double v) : v_(v) {}
  double eval(const Vec3&) const override { return v_; }
  Vec3 gradient(const Vec3&) const override { return {0, 0, 0}; }

 private:
  double v_;
};

double mean_nearest_quartile_distance(const RaySamples& rs, double t0) {
  std::vector<double> dist(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) dist[i] = std::abs(rs.t[i] - t0);
  std::sort(dist.begin(), dist.end());
  const std::size_t q = rs.size() / 4;
  double sum = 0.0;
  for (std::size_t i = 0; i < q; ++i) sum += dist[i];
  return sum / q;
}

}  // namespace

TEST_CASE("uniform samples: deterministic bin midpoints") {
  Rng rng = make_rng(1, 0);
  const RaySamples rs = uniform_samples(unit_ray(0, 1), 2, rng, true);
  REQUIRE(rs.size() == 2);
  CHECK(rs.t[0] == doctest::Approx(0.25));
  CHECK(rs.t[1] == doctest::Approx(0.75));
  CHECK(rs.delta[0] == doctest::Approx(0.5));
  CHECK(rs.delta[1] == doctest::Approx(0.25));  // capped at t_far
}

TEST_CASE("uniform samples: stratification bounds the largest gap") {
  Rng rng = make_rng(2, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const RaySamples rs = uniform_samples(unit_ray(0, 2), 64, rng, false);
    double max_gap = rs.t.front();
    for (std::size_t i = 1; i < rs.size(); ++i)
      max_gap = std::max(max_gap, rs.t[i] - rs.t[i - 1]);
    max_gap = std::max(max_gap, 2.0 - rs.t.back());
    CHECK(max_gap <= 2.0 * (2.0 / 64) + 1e-12);
  }
}

TEST_CASE("uniform samples: pooled draws pass a KS test at 1%") {
  Rng rng = make_rng(3, 0);
  std::vector<double> pooled;
  while (pooled.size() < 10000) {
    const RaySamples rs = uniform_samples(unit_ray(0.5, 2.5), 64, rng, false);
    for (double t : rs.t) pooled.push_back((t - 0.5) / 2.0);
  }
  CHECK(oracles::ks_statistic(pooled) < oracles::ks_critical_1pct(pooled.size()));
}

TEST_CASE("uniform samples: invalid arguments") {
  Rng rng = make_rng(4, 0);
  CHECK_THROWS_AS(uniform_samples(unit_ray(0, 1), 1, rng), std::invalid_argument);
  CHECK_THROWS_AS(uniform_samples(unit_ray(1, 1), 8, rng), std::invalid_argument);
}

TEST_CASE("importance resample: uniform weights stay uniform (KS)") {
  Rng rng = make_rng(5, 0);
  std::vector<double> pooled;
  while (pooled.size() < 10000) {
    const RaySamples base = uniform_samples(unit_ray(0, 1), 32, rng, true);
    const std::vector<double> w(base.size(), 1.0);
    const RaySamples out = importance_resample(base, w, 32, rng, false);
    // keep only the fresh samples: they interleave, so diff against the base
    std::vector<double> fresh;
    std::set_difference(out.t.begin(), out.t.end(), base.t.begin(),
                        base.t.end(), std::back_inserter(fresh));
    for (double t : fresh) pooled.push_back(t);
  }
  // uniform weights over midpoint strata cover [t0_mid, last_mid]; rescale
  const double lo = 1.0 / 64.0, hi = 1.0;
  for (double& t : pooled) t = (t - lo) / (hi - lo);
  CHECK(oracles::ks_statistic(pooled) <
        2.0 * oracles::ks_critical_1pct(pooled.size()));
}

TEST_CASE("importance resample: all mass in one segment") {
  Rng rng = make_rng(6, 0);
  const RaySamples base = uniform_samples(unit_ray(0, 1), 16, rng, true);
  std::vector<double> w(base.size(), 0.0);
  w[7] = 3.5;
  const RaySamples out = importance_resample(base, w, 64, rng, false);
  CHECK(out.size() == base.size() + 64);
  std::vector<double> fresh;
  std::set_difference(out.t.begin(), out.t.end(), base.t.begin(), base.t.end(),
                      std::back_inserter(fresh));
  REQUIRE(fresh.size() == 64);
  for (double t : fresh) {
    CHECK(t >= base.t[7]);
    CHECK(t <= base.t[7] + base.delta[7] + 1e-12);
  }
}

TEST_CASE("importance resample: counts match multinomial expectations") {
  Rng rng = make_rng(7, 0);
  const RaySamples base = uniform_samples(unit_ray(0, 1), 8, rng, true);
  std::vector<double> w = {0.05, 0.3, 0.0, 0.15, 0.25, 0.05, 0.1, 0.1};
  const int m = 1000;
  const RaySamples out = importance_resample(base, w, m, rng, false);
  std::vector<double> fresh;
  std::set_difference(out.t.begin(), out.t.end(), base.t.begin(), base.t.end(),
                      std::back_inserter(fresh));
  REQUIRE(static_cast<int>(fresh.size()) == m);
  std::vector<int> counts(8, 0);
  for (double t : fresh) {
    for (int seg = 7; seg >= 0; --seg) {
      if (t >= base.t[seg]) {
        ++counts[seg];
        break;
      }
    }
  }
  for (int seg = 0; seg < 8; ++seg) {
    const double expected = m * w[seg];
    const double sigma = std::sqrt(m * w[seg] * (1.0 - w[seg]));
    if (w[seg] == 0.0) {
      CHECK(counts[seg] == 0);
    } else {
      CHECK(std::abs(counts[seg] - expected) <= 3.0 * sigma);
    }
  }
}

TEST_CASE("importance resample: zero weights fall back to uniform") {
  Rng rng = make_rng(8, 0);
  const RaySamples base = uniform_samples(unit_ray(0, 1), 16, rng, true);
  const std::vector<double> w(base.size(), 0.0);
  const RaySamples out = importance_resample(base, w, 256, rng, false);
  CHECK(out.size() == base.size() + 256);
  // roughly uniform: every quarter of the interval gets a fair share
  int quarters[4] = {0, 0, 0, 0};
  for (double t : out.t) quarters[std::min(3, int(t * 4))]++;
  for (int q : quarters) CHECK(q > 40);
  CHECK_THROWS_AS(importance_resample(base, {1.0, 2.0}, 4, rng),
                  std::invalid_argument);
}

TEST_CASE("ahs schedule: paper values") {
  // s = 2000, k = 4
  CHECK(ahs_schedule(1, 4, 2000) == 250.0);
  CHECK(ahs_schedule(2, 4, 2000) == 500.0);
  CHECK(ahs_schedule(3, 4, 2000) == 1000.0);
  CHECK(ahs_schedule(4, 4, 2000) == 2000.0);
  // small s degenerates to the fixed rates 32*2^i
  CHECK(ahs_schedule(1, 4, 100) == 64.0);
  CHECK(ahs_schedule(2, 4, 100) == 128.0);
  CHECK(ahs_schedule(3, 4, 100) == 256.0);
  CHECK(ahs_schedule(4, 4, 100) == 512.0);
  // i = k keeps max(32*2^k, s)
  CHECK(ahs_schedule(4, 4, 2000) == std::max(512.0, 2000.0));
  CHECK_THROWS_AS(ahs_schedule(0, 4, 1000), std::invalid_argument);
  CHECK_THROWS_AS(ahs_schedule(5, 4, 1000), std::invalid_argument);
  CHECK_THROWS_AS(ahs_schedule(2, 4, -1), std::invalid_argument);
}

TEST_CASE("ahs schedule: non-decreasing in i") {
  Rng rng = make_rng(9, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const double s = 10.0 + 4000.0 * uniform01(rng);
    const int k = 1 + int(uniform01(rng) * 6);
    double prev = 0.0;
    for (int i = 1; i <= k; ++i) {
      const double cur = ahs_schedule(i, k, s);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("hierarchical: flat field stays near-uniform") {
  const ConstantField field(0.6);  // no surface within reach of the density
  const DensityParams params{1000.0, 5.0, 100.0};
  const SamplingConfig cfg{64, 16, 4, true, false};
  Rng rng = make_rng(10, 0);
  Ray ray = unit_ray(0.0, 2.0);
  const RaySamples rs = hierarchical_sample(field, ray, params, cfg, rng);
  CHECK(rs.size() == 64 + 4 * 16);
  double max_gap = rs.t.front();
  for (std::size_t i = 1; i < rs.size(); ++i)
    max_gap = std::max(max_gap, rs.t[i] - rs.t[i - 1]);
  max_gap = std::max(max_gap, 2.0 - rs.t.back());
  CHECK(max_gap <= 4.0 * (2.0 / 64));
}

TEST_CASE("hierarchical: samples are sorted, in range, with exact count") {
  const PlanarWall wall(1.3);
  const DensityParams params{700.0, 5.0, 100.0};
  Rng rng = make_rng(11, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const SamplingConfig cfg{16 + trial, 8, 3, trial % 2 == 0, false};
    const Ray ray = unit_ray(0.1, 2.1);
    const RaySamples rs = hierarchical_sample(wall, ray, params, cfg, rng);
    CHECK(rs.size() == std::size_t(cfg.n_uniform + cfg.iters * cfg.per_iter));
    for (std::size_t i = 0; i < rs.size(); ++i) {
      if (i > 0) CHECK(rs.t[i] > rs.t[i - 1]);
      CHECK(rs.t[i] >= ray.t_near);
      CHECK(rs.t[i] <= ray.t_far);
    }
  }
}

TEST_CASE("hierarchical: planar scene concentrates samples at the wall") {
  const PlanarWall wall(1.0);
  const DensityParams params{1000.0, 5.0, 100.0};
  const SamplingConfig cfg{64, 16, 4, true, false};
  double within = 0.0, total = 0.0;
  for (int trial = 0; trial < 32; ++trial) {
    Rng rng = make_rng(12, trial);
    const RaySamples rs =
        hierarchical_sample(wall, unit_ray(0.0, 2.0), params, cfg, rng);
    for (double t : rs.t) {
      within += std::abs(t - 1.0) <= 0.01 ? 1.0 : 0.0;
      total += 1.0;
    }
  }
  // importance iterations at schedule sharpness put the added samples near
  // the wall; the 64 uniform samples dilute the fraction to about a third
  CHECK(within / total >= 0.30);
}

TEST_CASE("hierarchical: ahs concentrates better than fixed rates at s=2000") {
  const PlanarWall wall(1.0);
  const DensityParams params{2000.0, 5.0, 100.0};
  double mean_on = 0.0, mean_off = 0.0;
  const int trials = 48;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng_on = make_rng(13, trial);
    Rng rng_off = make_rng(13, trial);
    const SamplingConfig on{64, 16, 4, true, false};
    const SamplingConfig off{64, 16, 4, false, false};
    mean_on += mean_nearest_quartile_distance(
        hierarchical_sample(wall, unit_ray(0, 2), params, on, rng_on), 1.0);
    mean_off += mean_nearest_quartile_distance(
        hierarchical_sample(wall, unit_ray(0, 2), params, off, rng_off), 1.0);
  }
  mean_on /= trials;
  mean_off /= trials;
  CHECK(mean_on < mean_off);
}
