// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "udfr/vec.hpp"

namespace udfr {

// Pinhole camera, OpenCV-style frame: x right, y down, z = optical axis.
// rotation/translation map world points into the camera frame:
//   p_cam = R * p_world + t.
struct Camera {
  double fx = 0.0, fy = 0.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;
  Mat3 rotation;
  Vec3 translation;

  // Throws std::invalid_argument if intrinsics are non-positive, the image is
  // empty, or rotation is not orthonormal to 1e-9.
  void validate() const;

  Vec3 center() const;        // camera position in world space
  Vec3 optical_axis() const;  // unit +z axis of the camera, in world space
};

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
  double t_near = 0.0;
  double t_far = 0.0;

  Vec3 at(double t) const { return origin + direction * t; }
};

struct PointCloud {
  std::vector<Vec3> points;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

// n cameras equally spaced in azimuth on a circle of the given radius and
// elevation (radians, measured from the target's horizontal plane), each
// looking at `target`. World up is +z.
std::vector<Camera> generate_orbit_poses(int n, double radius, double elevation,
                                         const Vec3& target, double focal,
                                         int width, int height);

// Ray through the center of pixel (px, py); the +0.5 pixel-center offset is
// applied here. t bounds default to [0, 1e9] and are typically clipped by the
// caller against the scene domain.
Ray pixel_ray(const Camera& camera, int px, int py, double t_near = 0.0,
              double t_far = 1e9);

// Symmetric point-to-point Chamfer distance:
//   0.5 * (mean_a min_b |a-b| + mean_b min_a |a-b|)
// using plain (not squared) L2 distances. Throws on empty input.
double chamfer(const PointCloud& a, const PointCloud& b, int n_threads = 1);

// Clips [ray.t_near, ray.t_far] to the ray's chord through the given sphere.
// Returns false (and leaves the ray alone) when the ray misses the sphere or
// the chord lies outside the current bounds.
bool clip_to_sphere(Ray& ray, const Vec3& center, double radius);

// ASCII PLY with "element vertex N" and float x/y/z properties.
void write_ply(const std::string& path, const PointCloud& cloud);
PointCloud read_ply(const std::string& path);

}  // namespace udfr
