// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "udfr/density.hpp"
#include "udfr/fields.hpp"
#include "udfr/geometry.hpp"
#include "udfr/sampling.hpp"

namespace udfr {

// View-independent color field; rgb components are clamped to [0,1] on
// output.
class ColorField {
 public:
  virtual ~ColorField() = default;
  virtual Vec3 color(const Vec3& p) const = 0;
};

class ConstantColor final : public ColorField {
 public:
  explicit ConstantColor(const Vec3& rgb) : rgb_(rgb) {}
  Vec3 color(const Vec3&) const override { return rgb_; }

 private:
  Vec3 rgb_;
};

// Axis-aligned checker of two colors with the given spatial period.
class CheckerColor final : public ColorField {
 public:
  CheckerColor(const Vec3& a, const Vec3& b, double period)
      : a_(a), b_(b), period_(period) {}
  Vec3 color(const Vec3& p) const override;

 private:
  Vec3 a_, b_;
  double period_;
};

// Trainable RGB voxel grid; values interleaved rgb per node, trilinear with
// clamped out-of-bounds queries like VoxelGrid.
class ColorGrid final : public ColorField {
 public:
  ColorGrid() = default;
  ColorGrid(int nx, int ny, int nz, const Aabb& bounds, const Vec3& fill);
  Vec3 color(const Vec3& p) const override;

  VoxelGrid& geometry() { return shape_; }          // weights/stencils only
  const VoxelGrid& geometry() const { return shape_; }
  std::vector<double>& values() { return values_; }  // 3 * node_count
  const std::vector<double>& values() const { return values_; }

 private:
  VoxelGrid shape_;  // carries resolution/bounds; its scalar values unused
  std::vector<double> values_;
};

struct Image {
  int width = 0, height = 0;
  std::vector<double> rgb;  // row-major, 3 doubles per pixel, in [0,1]

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(3 * w * h, 0.0) {}
  double* pixel(int x, int y) { return &rgb[3 * (y * width + x)]; }
  const double* pixel(int x, int y) const { return &rgb[3 * (y * width + x)]; }
};

// alpha[i] = 1 - exp(-sigma[i] * delta[i]); trans[i] = prod_{j<i}(1-alpha[j]);
// w[i] = trans[i] * alpha[i]. Throws on negative sigma or non-positive delta.
void compute_weights(const std::vector<double>& sigma,
                     const std::vector<double>& delta,
                     std::vector<double>& alpha, std::vector<double>& trans,
                     std::vector<double>& w);

struct RenderParams {
  DensityParams density;
  SamplingConfig sampling;
  Vec3 background{1.0, 1.0, 1.0};
  // when set, use theoretical_density with cos(theta) from field gradients
  // instead of the modified density
  bool theoretical = false;
  // rays are clipped to this sphere before sampling; rays that miss it
  // return the background directly
  Vec3 domain_center{0.0, 0.0, 0.0};
  double domain_radius = 1.2;
};

struct RayRender {
  Vec3 rgb;
  double weight_sum = 0.0;
  RaySamples samples;
  bool hit_domain = false;
};

// Full quadrature for one ray: hierarchical sampling, densities, weights,
// color = sum_i w_i c_i + (1 - sum w) * background. Never returns NaN.
RayRender render_ray(const UdfField& field, const ColorField& color,
                     const Ray& ray, const RenderParams& params, Rng& rng);

// Per-pixel render_ray over the camera's image plane; deterministic for a
// fixed seed (each pixel owns an independent random stream).
Image render_image(const UdfField& field, const ColorField& color,
                   const Camera& camera, const RenderParams& params,
                   std::uint64_t seed, int n_threads = 1);

// Binary PPM (P6), 8 bits per channel.
void write_ppm(const std::string& path, const Image& image);
Image read_ppm(const std::string& path);

}  // namespace udfr
