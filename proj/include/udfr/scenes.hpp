// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "udfr/fields.hpp"
#include "udfr/geometry.hpp"
#include "udfr/render.hpp"

namespace udfr {

// Synthetic ground-truth scene: an exact analytic UDF with a color scheme and
// an orbit of cameras. Surfaces fit inside the unit sphere; cameras sit
// outside it.
struct Scene {
  std::string name;
  std::shared_ptr<AnalyticSurface> udf;
  std::shared_ptr<ColorField> color;
  Vec3 background{1.0, 1.0, 1.0};
  std::vector<Camera> cameras;
};

struct SceneOptions {
  double surface_radius = 0.8;
  std::string color_scheme = "constant";  // constant | checker
  int n_views = 36;
  int image_size = 64;
  double camera_radius = 2.2;
  double camera_focal = 80.0;
  double elevation_deg = 30.0;
};

// Known names: sphere-shell, disk-open, hemisphere-shell, two-planes,
// rect-patch. Throws std::invalid_argument for anything else.
Scene build_scene(const std::string& name, const SceneOptions& opts = {});

// n points sampled uniformly by area on the analytic surface.
PointCloud ground_truth_cloud(const Scene& scene, int n, std::uint64_t seed);

// Reference views rendered from the exact analytic UDF at high sample count.
std::vector<Image> render_references(const Scene& scene,
                                     const RenderParams& params,
                                     std::uint64_t seed, int n_threads = 1);

// High-quality default renderer parameters for reference images:
// 64 + 4*112 = 512 samples per ray, modified density at s=1000.
RenderParams reference_render_params();

// Scene bundle directory: view_###.ppm images, cameras.txt (per camera:
// fx fy cx cy width height + 3x4 [R|t] row-major), gt.ply.
void save_scene_bundle(const std::string& dir, const Scene& scene,
                       const std::vector<Image>& images,
                       const PointCloud& ground_truth);
struct SceneBundle {
  std::vector<Camera> cameras;
  std::vector<Image> images;
  PointCloud ground_truth;
};
SceneBundle load_scene_bundle(const std::string& dir);

void write_cameras_file(const std::string& path,
                        const std::vector<Camera>& cameras);
std::vector<Camera> read_cameras_file(const std::string& path);

}  // namespace udfr
