// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "udfr/fields.hpp"

using namespace udfr;

TEST_CASE("softplus: frozen values") {
  // references computed with 40-digit arithmetic
  CHECK(softplus(0.0, 100.0) ==
        doctest::Approx(0.0069314718055994531).epsilon(1e-12));
  CHECK(softplus(0.1, 100.0) ==
        doctest::Approx(0.10000045398899217).epsilon(1e-12));
  CHECK(softplus(-0.1, 100.0) ==
        doctest::Approx(4.5398899216864647e-07).epsilon(1e-12));
  CHECK(softplus(-0.1, 100.0) > 0.0);
  CHECK_THROWS_AS(softplus(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("softplus_grad: frozen values and positivity") {
  CHECK(softplus_grad(0.0, 100.0) == 0.5);
  CHECK(softplus_grad(-0.01, 100.0) ==
        doctest::Approx(0.26894142136999512).epsilon(1e-12));
  const double tiny = softplus_grad(-10.0, 100.0);
  CHECK(tiny > 0.0);
  CHECK(tiny < 1e-300);
  CHECK(std::isfinite(tiny));
}

TEST_CASE("softplus: dominates ReLU and converges to it") {
  Rng rng = make_rng(3, 0);
  for (int i = 0; i < 2000; ++i) {
    const double x = 40.0 * (uniform01(rng) - 0.5);
    const double beta = 1.0 + 99.0 * uniform01(rng);
    const double sp = softplus(x, beta);
    CHECK(sp > std::max(0.0, x));
    CHECK(softplus(x + 1e-3, beta) > sp);  // monotone
  }
  CHECK(softplus(50.0, 100.0) - 50.0 < 1e-12);  // -> x for large x
}

TEST_CASE("sphere shell: exact distances and gradients") {
  const SphereShell sphere({0, 0, 0}, 1.0);
  CHECK(sphere.eval({2, 0, 0}) == doctest::Approx(1.0));
  CHECK(sphere.eval({0.5, 0, 0}) == doctest::Approx(0.5));  // inside, positive
  CHECK(norm(sphere.gradient({2, 0, 0}) - Vec3{1, 0, 0}) < 1e-12);
  CHECK(norm(sphere.gradient({0.5, 0, 0}) - Vec3{-1, 0, 0}) < 1e-12);
}

TEST_CASE("disk: rim distance matches the dense surface-sampling oracle") {
  const DiskOpen disk({0, 0, 0}, {0, 0, 1}, 1.0);
  CHECK(disk.eval({2, 0, 0}) == doctest::Approx(1.0));  // distance to the rim
  CHECK(disk.eval({0, 0, 0.5}) == doctest::Approx(0.5));
  CHECK(disk.eval({1.5, 0, 0.5}) ==
        doctest::Approx(std::sqrt(0.5 * 0.5 + 0.5 * 0.5)));

  // minimization over 1e6 area-uniform surface points
  Rng rng = make_rng(5, 0);
  std::vector<Vec3> surface(1000000);
  for (auto& p : surface) p = disk.sample_surface(rng);
  for (const Vec3 q : {Vec3{2, 0, 0}, Vec3{0.3, -0.4, 0.7}, Vec3{-1.2, 0.9, -0.3},
                       Vec3{0, 0, -0.25}}) {
    double best = 1e300;
    for (const Vec3& p : surface) best = std::min(best, norm(q - p));
    CHECK(disk.eval(q) == doctest::Approx(best).epsilon(1e-4));
    CHECK(disk.eval(q) <= best + 1e-12);  // true distance is a lower bound
  }
}

TEST_CASE("hemisphere shell: cap and rim cases") {
  const HemisphereShell hemi({0, 0, 0}, 1.0, {0, 0, 1});
  CHECK(hemi.eval({0, 0, 2}) == doctest::Approx(1.0));       // above the pole
  CHECK(hemi.eval({0, 0, 0.5}) == doctest::Approx(0.5));     // inside the cap
  CHECK(hemi.eval({0, 0, -1}) == doctest::Approx(std::sqrt(2.0)));  // to rim
  CHECK(hemi.eval({2, 0, -1}) == doctest::Approx(std::sqrt(2.0)));
  // just beyond the rim the distance is realized at the rim circle
  CHECK(hemi.eval({1.01, 0, -0.01}) ==
        doctest::Approx(std::sqrt(0.01 * 0.01 + 0.01 * 0.01)));
}

TEST_CASE("rect patch: face, edge and corner distances") {
  const RectPatch rect({0, 0, 0}, {0, 0, 1}, 0.5, 0.25);
  CHECK(rect.eval({0, 0, 0.3}) == doctest::Approx(0.3));
  const Vec3 g = rect.gradient({0.1, 0.05, 0.3});
  CHECK(norm(g - Vec3{0, 0, 1}) < 1e-12);
  // beyond an edge: in-plane offset to the boundary plus height
  const double diag = rect.eval({0.9, 0.55, 0.2});
  CHECK(diag == doctest::Approx(std::sqrt(0.4 * 0.4 + 0.3 * 0.3 + 0.2 * 0.2)));
}

TEST_CASE("union surface: pointwise min") {
  auto a = std::make_shared<SphereShell>(Vec3{0, 0, 0}, 0.5);
  auto b = std::make_shared<SphereShell>(Vec3{2, 0, 0}, 0.5);
  const UnionSurface u({a, b});
  CHECK(u.eval({0.7, 0, 0}) == doctest::Approx(0.2));
  CHECK(u.eval({1.6, 0, 0}) == doctest::Approx(std::min(1.1, 0.1)));
  CHECK(u.surface_area() ==
        doctest::Approx(a->surface_area() + b->surface_area()));
}

TEST_CASE("analytic fields: non-negative on 1e5 random points") {
  Rng rng = make_rng(7, 0);
  const SphereShell sphere({0, 0, 0}, 0.8);
  const DiskOpen disk({0, 0, 0}, {0, 0, 1}, 0.8);
  const HemisphereShell hemi({0, 0, 0}, 0.8, {0, 0, 1});
  const RectPatch rect({0, 0, 0}, {0, 0, 1}, 0.6, 0.45);
  for (int i = 0; i < 100000; ++i) {
    const Vec3 p{2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1,
                 2 * uniform01(rng) - 1};
    CHECK(sphere.eval(p) >= 0.0);
    CHECK(disk.eval(p) >= 0.0);
    CHECK(hemi.eval(p) >= 0.0);
    CHECK(rect.eval(p) >= 0.0);
  }
}

TEST_CASE("analytic fields: eikonal property away from medial loci") {
  Rng rng = make_rng(11, 0);
  const SphereShell sphere({0, 0, 0}, 0.8);
  const DiskOpen disk({0, 0, 0}, {0, 0, 1}, 0.8);
  const HemisphereShell hemi({0, 0, 0}, 0.8, {0, 0, 1});
  const RectPatch rect({0, 0, 0}, {0, 0, 1}, 0.6, 0.45);
  int checked = 0;
  for (int i = 0; i < 20000; ++i) {
    const Vec3 p{2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1,
                 2 * uniform01(rng) - 1};
    const auto check = [&](const UdfField& field) {
      if (field.eval(p) <= 1e-3) return;
      CHECK(norm(field.gradient(p)) == doctest::Approx(1.0).epsilon(1e-4));
      ++checked;
    };
    if (norm(p) > 0.02) check(sphere);
    check(disk);
    check(rect);
    // skip the medial half-axis below the hemisphere rim plane
    if (!(p.z < 0.0 && std::hypot(p.x, p.y) < 0.02)) check(hemi);
  }
  CHECK(checked > 40000);
}

TEST_CASE("voxel grid: interpolation is exact at nodes and for linears") {
  VoxelGrid grid(5, 4, 6, Aabb{{-1, -1, -1}, {1, 1, 1}});
  const auto linear = [](const Vec3& p) {
    return 0.7 * p.x - 1.3 * p.y + 0.25 * p.z + 0.4;
  };
  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        grid.values[grid.index(i, j, k)] = linear(grid.node_position(i, j, k));

  for (int k = 0; k < grid.nz; ++k)
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        CHECK(grid.sample(grid.node_position(i, j, k)) ==
              doctest::Approx(grid.values[grid.index(i, j, k)]).epsilon(1e-12));

  Rng rng = make_rng(13, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec3 p{2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1,
                 2 * uniform01(rng) - 1};
    CHECK(grid.sample(p) == doctest::Approx(linear(p)).epsilon(1e-12));
  }
}

TEST_CASE("voxel grid: analytic gradient matches finite differences") {
  VoxelGrid grid(6, 6, 6, Aabb{{-1, -1, -1}, {1, 1, 1}});
  Rng rng = make_rng(29, 0);
  for (auto& v : grid.values) v = 2 * uniform01(rng) - 1;
  int tested = 0;
  for (int trial = 0; trial < 4000 && tested < 500; ++trial) {
    const Vec3 p{2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1,
                 2 * uniform01(rng) - 1};
    // stay inside one cell so the FD stencil does not straddle a kink
    const double cell = 2.0 / 5.0;
    bool interior = true;
    for (int a = 0; a < 3; ++a) {
      const double u = (p[a] + 1.0) / cell;
      const double frac = u - std::floor(u);
      interior = interior && frac > 0.01 && frac < 0.99;
    }
    if (!interior) continue;
    ++tested;
    const Vec3 fd = oracles::fd_gradient(
        [&](const Vec3& q) { return grid.sample(q); }, p);
    CHECK(norm(grid.sample_gradient(p) - fd) < 1e-5);
  }
  CHECK(tested == 500);
}

TEST_CASE("voxel grid: out-of-bounds queries clamp and stay finite") {
  VoxelGrid grid(4, 4, 4, Aabb{{-1, -1, -1}, {1, 1, 1}});
  Rng rng = make_rng(31, 0);
  for (auto& v : grid.values) v = 2 * uniform01(rng) - 1;
  for (const Vec3 p : {Vec3{5, 0, 0}, Vec3{-3, 2, 9}, Vec3{0, -8, 0.5}}) {
    CHECK(std::isfinite(grid.sample(p)));
    CHECK(finite(grid.sample_gradient(p)));
    CHECK(grid.sample(p) == grid.sample(grid.bounds.clamp(p)));
  }
  CHECK_THROWS_AS(VoxelGrid(1, 4, 4, Aabb{}), std::invalid_argument);
}

TEST_CASE("softplus grid: non-negativity and FD gradient check") {
  VoxelGrid raw(8, 8, 8, Aabb{{-1, -1, -1}, {1, 1, 1}});
  Rng rng = make_rng(37, 0);
  for (auto& v : raw.values) v = 0.6 * uniform01(rng) - 0.1;
  const SoftplusGridUdf field(raw, 100.0);

  int tested = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const Vec3 p{2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1,
                 2 * uniform01(rng) - 1};
    CHECK(field.eval(p) >= 0.0);
    const double cell = 2.0 / 7.0;
    bool interior = true;
    for (int a = 0; a < 3; ++a) {
      const double u = (p[a] + 1.0) / cell;
      const double frac = u - std::floor(u);
      interior = interior && frac > 0.05 && frac < 0.95;
    }
    if (!interior || tested >= 200) continue;
    ++tested;
    const Vec3 fd = oracles::fd_gradient(
        [&](const Vec3& q) { return field.eval(q); }, p);
    const Vec3 an = field.gradient(p);
    CHECK(norm(an - fd) <= 1e-3 * std::max(1.0, norm(fd)));
  }
  CHECK(tested == 200);
}

TEST_CASE("grid file round trip") {
  VoxelGrid grid(5, 3, 7, Aabb{{-1, -0.5, -1}, {1, 0.5, 2}});
  Rng rng = make_rng(41, 0);
  for (auto& v : grid.values) v = 10 * (uniform01(rng) - 0.5);
  const std::string path =
      (std::filesystem::temp_directory_path() / "udfr_test_grid.bin").string();
  save_grid(path, grid);
  const VoxelGrid back = load_grid(path);
  CHECK(back.nx == grid.nx);
  CHECK(back.ny == grid.ny);
  CHECK(back.nz == grid.nz);
  CHECK(norm(back.bounds.min - grid.bounds.min) < 1e-6);
  CHECK(norm(back.bounds.max - grid.bounds.max) < 1e-6);
  REQUIRE(back.values.size() == grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i)
    CHECK(back.values[i] == grid.values[i]);  // float64 payload is bit-exact
  std::remove(path.c_str());
  CHECK_THROWS(load_grid("/nonexistent/grid.bin"));
}
