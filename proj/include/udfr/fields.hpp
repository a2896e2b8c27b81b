// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "udfr/rng.hpp"
#include "udfr/vec.hpp"

namespace udfr {

// softplus(x) = ln(1 + e^{beta x}) / beta, computed without overflow for
// large beta*x. Strictly positive for all finite x.
double softplus(double x, double beta);

// d softplus / dx = sigmoid(beta x). Clamped to the smallest positive double
// so the result never underflows to zero (the mathematical value is positive
// everywhere).
double softplus_grad(double x, double beta);

// Gradient norms below this are treated as degenerate; samplers substitute
// the previous sample's gradient.
inline constexpr double kDegenerateGradNorm = 1e-6;

// Unsigned distance field: eval() >= 0, gradient() is the spatial gradient
// of eval (analytic where available, otherwise central differences).
class UdfField {
 public:
  virtual ~UdfField() = default;
  virtual double eval(const Vec3& p) const = 0;
  virtual Vec3 gradient(const Vec3& p) const;  // default: central FD, h=1e-4
};

// Analytic primitive with exact surface distance; also exposes area-uniform
// surface sampling for ground-truth cloud generation.
class AnalyticSurface : public UdfField {
 public:
  virtual double surface_area() const = 0;
  virtual Vec3 sample_surface(Rng& rng) const = 0;
};

class SphereShell final : public AnalyticSurface {
 public:
  SphereShell(const Vec3& center, double radius);
  double eval(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  double surface_area() const override;
  Vec3 sample_surface(Rng& rng) const override;
  double radius() const { return radius_; }
  const Vec3& center() const { return center_; }

 private:
  Vec3 center_;
  double radius_;
};

// Open flat disk of the given radius in the plane through `center` with unit
// normal `normal`. Distance beyond the rim goes to the rim circle.
class DiskOpen final : public AnalyticSurface {
 public:
  DiskOpen(const Vec3& center, const Vec3& normal, double radius);
  double eval(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  double surface_area() const override;
  Vec3 sample_surface(Rng& rng) const override;

 private:
  Vec3 center_, normal_, u_, v_;
  double radius_;
};

// Open rectangular patch centered at `center`, normal `normal`, in-plane
// half extents (hu, hv) along a deterministic tangent basis.
class RectPatch final : public AnalyticSurface {
 public:
  RectPatch(const Vec3& center, const Vec3& normal, double hu, double hv);
  double eval(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  double surface_area() const override;
  Vec3 sample_surface(Rng& rng) const override;

 private:
  Vec3 center_, normal_, u_, v_;
  double hu_, hv_;
};

// Open hemispherical shell: the half of the sphere with (p-center)·axis >= 0.
class HemisphereShell final : public AnalyticSurface {
 public:
  HemisphereShell(const Vec3& center, double radius, const Vec3& axis);
  double eval(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  double surface_area() const override;
  Vec3 sample_surface(Rng& rng) const override;

 private:
  Vec3 center_, axis_, u_, v_;
  double radius_;
};

// Union of surfaces: pointwise min distance.
class UnionSurface final : public AnalyticSurface {
 public:
  explicit UnionSurface(std::vector<std::shared_ptr<AnalyticSurface>> parts);
  double eval(const Vec3& p) const override;
  Vec3 gradient(const Vec3& p) const override;
  double surface_area() const override;
  Vec3 sample_surface(Rng& rng) const override;

 private:
  std::vector<std::shared_ptr<AnalyticSurface>> parts_;
  double total_area_;
};

// Dense scalar grid with trilinear interpolation over an axis-aligned box.
// Values are stored x-fastest: index = i + nx*(j + ny*k). Queries outside the
// bounds are clamped to the boundary (never extrapolated, never NaN).
struct VoxelGrid {
  int nx = 0, ny = 0, nz = 0;
  Aabb bounds;
  std::vector<double> values;

  VoxelGrid() = default;
  VoxelGrid(int nx_, int ny_, int nz_, const Aabb& bounds_, double fill = 0.0);

  std::size_t node_count() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(nx) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(ny) * static_cast<std::size_t>(k));
  }
  Vec3 node_position(int i, int j, int k) const;

  // Interpolation stencil at p (after clamping): 8 node indices, trilinear
  // weights, and the spatial gradient of each weight. Axes that were clamped
  // outside the bounds get zero weight-gradients, matching the derivative of
  // the clamped evaluation.
  struct Stencil {
    std::size_t idx[8];
    double w[8];
    Vec3 dw[8];
  };
  Stencil stencil(const Vec3& p) const;

  double sample(const Vec3& p) const;
  Vec3 sample_gradient(const Vec3& p) const;
};

// Raw trilinear grid exposed as a field (may be negative; used for tests and
// as the pre-softplus layer).
class GridUdf final : public UdfField {
 public:
  explicit GridUdf(VoxelGrid grid) : grid_(std::move(grid)) {}
  double eval(const Vec3& p) const override { return grid_.sample(p); }
  Vec3 gradient(const Vec3& p) const override {
    return grid_.sample_gradient(p);
  }
  const VoxelGrid& grid() const { return grid_; }
  VoxelGrid& grid() { return grid_; }

 private:
  VoxelGrid grid_;
};

// softplus(trilinear(raw), beta): non-negative and differentiable everywhere.
class SoftplusGridUdf final : public UdfField {
 public:
  SoftplusGridUdf(VoxelGrid raw, double beta)
      : grid_(std::move(raw)), beta_(beta) {}
  double eval(const Vec3& p) const override {
    return softplus(grid_.sample(p), beta_);
  }
  Vec3 gradient(const Vec3& p) const override {
    return grid_.sample_gradient(p) * softplus_grad(grid_.sample(p), beta_);
  }
  const VoxelGrid& grid() const { return grid_; }
  VoxelGrid& grid() { return grid_; }
  double beta() const { return beta_; }

 private:
  VoxelGrid grid_;
  double beta_;
};

// Flat binary grid file. 32-byte header:
//   bytes  0-1   magic "UG"
//   bytes  2-7   nx, ny, nz as uint16 little-endian
//   bytes  8-31  bounds min.x,min.y,min.z,max.x,max.y,max.z as float32 LE
// followed by nx*ny*nz float64 LE values in x-fastest order.
void save_grid(const std::string& path, const VoxelGrid& grid);
VoxelGrid load_grid(const std::string& path);

}  // namespace udfr
