// SPDX-License-Identifier: Apache-2.0
#include "udfr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "udfr/parallel.hpp"

namespace udfr {

void Camera::validate() const {
  if (fx <= 0.0 || fy <= 0.0)
    throw std::invalid_argument("Camera: focal lengths must be positive");
  if (width < 1 || height < 1)
    throw std::invalid_argument("Camera: image must be at least 1x1");
  if (orthonormality_error(rotation) > 1e-9)
    throw std::invalid_argument("Camera: rotation is not orthonormal");
}

Vec3 Camera::center() const {
  // p_cam = R p + t == 0  =>  p = -R^T t
  return rotation.transposed() * (-translation);
}

Vec3 Camera::optical_axis() const { return rotation.row(2); }

std::vector<Camera> generate_orbit_poses(int n, double radius, double elevation,
                                         const Vec3& target, double focal,
                                         int width, int height) {
  if (n < 1) throw std::invalid_argument("generate_orbit_poses: n must be >= 1");
  if (radius <= 0.0)
    throw std::invalid_argument("generate_orbit_poses: radius must be positive");

  std::vector<Camera> cameras;
  cameras.reserve(n);
  const Vec3 world_up{0, 0, 1};
  for (int i = 0; i < n; ++i) {
    const double az = 2.0 * M_PI * i / n;
    const Vec3 offset{radius * std::cos(elevation) * std::cos(az),
                      radius * std::cos(elevation) * std::sin(az),
                      radius * std::sin(elevation)};
    const Vec3 position = target + offset;

    const Vec3 forward = normalized(target - position);  // camera +z
    Vec3 right = cross(forward, world_up);
    if (norm(right) < 1e-9) right = cross(forward, Vec3{1, 0, 0});
    right = normalized(right);
    const Vec3 down = cross(forward, right);  // camera +y

    Camera cam;
    cam.fx = cam.fy = focal;
    cam.cx = 0.5 * width;
    cam.cy = 0.5 * height;
    cam.width = width;
    cam.height = height;
    cam.rotation = Mat3::from_rows(right, down, forward);
    cam.translation = -(cam.rotation * position);
    cam.validate();
    cameras.push_back(cam);
  }
  return cameras;
}

Ray pixel_ray(const Camera& camera, int px, int py, double t_near,
              double t_far) {
  if (px < 0 || px >= camera.width || py < 0 || py >= camera.height)
    throw std::invalid_argument("pixel_ray: pixel out of bounds");
  const Vec3 dir_cam{(px + 0.5 - camera.cx) / camera.fx,
                     (py + 0.5 - camera.cy) / camera.fy, 1.0};
  Ray ray;
  ray.origin = camera.center();
  ray.direction = normalized(camera.rotation.transposed() * dir_cam);
  ray.t_near = t_near;
  ray.t_far = t_far;
  return ray;
}

namespace {

double mean_nearest_distance(const std::vector<Vec3>& from,
                             const std::vector<Vec3>& to, int n_threads) {
  std::vector<double> partial(std::max(n_threads, 1), 0.0);
  parallel_chunks(from.size(), n_threads,
                  [&](int w, std::size_t begin, std::size_t end) {
                    double sum = 0.0;
                    for (std::size_t i = begin; i < end; ++i) {
                      double best = std::numeric_limits<double>::infinity();
                      for (const Vec3& q : to)
                        best = std::min(best, norm2(from[i] - q));
                      sum += std::sqrt(best);
                    }
                    partial[w] = sum;
                  });
    double total = 0.0;
  for (double s : partial) total += s;
  return total / static_cast<double>(from.size());
}

}  // namespace

double chamfer(const PointCloud& a, const PointCloud& b, int n_threads) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("chamfer: point clouds must be non-empty");
  return 0.5 * (mean_nearest_distance(a.points, b.points, n_threads) +
                mean_nearest_distance(b.points, a.points, n_threads));
}

bool clip_to_sphere(Ray& ray, const Vec3& center, double radius) {
  const Vec3 oc = ray.origin - center;
  const double b = dot(oc, ray.direction);
  const double c = norm2(oc) - radius * radius;
  const double disc = b * b - c;
  if (disc <= 0.0) return false;
  const double sq = std::sqrt(disc);
  const double t0 = std::max(-b - sq, ray.t_near);
  const double t1 = std::min(-b + sq, ray.t_far);
  if (t0 >= t1) return false;
  ray.t_near = t0;
  ray.t_far = t1;
  return true;
}

void write_ply(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_ply: cannot open " + path);
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << cloud.points.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "end_header\n";
  out.precision(9);
  for (const Vec3& p : cloud.points)
    out << p.x << " " << p.y << " " << p.z << "\n";
  if (!out) throw std::runtime_error("write_ply: write failed for " + path);
}

PointCloud read_ply(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_ply: cannot open " + path);
  std::string line;
  std::size_t n_vertices = 0;
  bool saw_magic = false;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    if (!saw_magic) {
      if (tok != "ply") throw std::runtime_error("read_ply: not a PLY file");
      saw_magic = true;
      continue;
    }
    if (tok == "element") {
      std::string what;
      ss >> what;
      if (what == "vertex") ss >> n_vertices;
    } else if (tok == "format") {
      std::string fmt;
      ss >> fmt;
      if (fmt != "ascii")
        throw std::runtime_error("read_ply: only ascii PLY is supported");
    } else if (tok == "end_header") {
      break;
    }
  }
  PointCloud cloud;
  cloud.points.reserve(n_vertices);
  for (std::size_t i = 0; i < n_vertices; ++i) {
    Vec3 p;
    if (!(in >> p.x >> p.y >> p.z))
      throw std::runtime_error("read_ply: truncated vertex data in " + path);
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace udfr
