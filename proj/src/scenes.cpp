// SPDX-License-Identifier: Apache-2.0
#include "udfr/scenes.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "udfr/parallel.hpp"

namespace udfr {

namespace {

std::shared_ptr<ColorField> make_colors(const std::string& scheme) {
  const Vec3 primary{0.8, 0.25, 0.2};
  const Vec3 secondary{0.15, 0.3, 0.75};
  if (scheme == "constant") return std::make_shared<ConstantColor>(primary);
  if (scheme == "checker")
    // 0.1 world-unit period: the texture-rich variant
    return std::make_shared<CheckerColor>(primary, secondary, 0.1);
  throw std::invalid_argument("build_scene: unknown color scheme " + scheme);
}

}  // namespace

Scene build_scene(const std::string& name, const SceneOptions& opts) {
  Scene scene;
  scene.name = name;
  const double r = opts.surface_radius;
  if (r <= 0.0 || r >= 1.0)
    throw std::invalid_argument(
        "build_scene: surface_radius must be inside the unit sphere");

  if (name == "sphere-shell") {
    scene.udf = std::make_shared<SphereShell>(Vec3{0, 0, 0}, r);
  } else if (name == "disk-open") {
    scene.udf = std::make_shared<DiskOpen>(Vec3{0, 0, 0}, Vec3{0, 0, 1}, r);
  } else if (name == "hemisphere-shell") {
    scene.udf =
        std::make_shared<HemisphereShell>(Vec3{0, 0, 0}, r, Vec3{0, 0, 1});
  } else if (name == "two-planes") {
    const double h = 0.75 * r;
    std::vector<std::shared_ptr<AnalyticSurface>> parts = {
        std::make_shared<RectPatch>(Vec3{0, 0, 0.2}, Vec3{0, 0, 1}, h, h),
        std::make_shared<RectPatch>(Vec3{0, 0, -0.2}, Vec3{0, 0, 1}, h, h)};
    scene.udf = std::make_shared<UnionSurface>(std::move(parts));
  } else if (name == "rect-patch") {
    scene.udf =
        std::make_shared<RectPatch>(Vec3{0, 0, 0}, Vec3{0, 0, 1}, r, 0.75 * r);
  } else {
    throw std::invalid_argument("build_scene: unknown scene " + name);
  }

  scene.color = make_colors(opts.color_scheme);
  if (opts.camera_radius <= 1.0)
    throw std::invalid_argument(
        "build_scene: cameras must sit outside the unit sphere");
  scene.cameras = generate_orbit_poses(
      opts.n_views, opts.camera_radius, opts.elevation_deg * M_PI / 180.0,
      Vec3{0, 0, 0}, opts.camera_focal, opts.image_size, opts.image_size);
  return scene;
}

PointCloud ground_truth_cloud(const Scene& scene, int n, std::uint64_t seed) {
  if (n < 1)
    throw std::invalid_argument("ground_truth_cloud: n must be >= 1");
  Rng rng = make_rng(seed, 0xC10Dull);
  PointCloud cloud;
  cloud.points.reserve(n);
  for (int i = 0; i < n; ++i)
    cloud.points.push_back(scene.udf->sample_surface(rng));
  return cloud;
}

RenderParams reference_render_params() {
  RenderParams params;
  params.density = DensityParams{1000.0, 5.0, 100.0};
  params.sampling = SamplingConfig{64, 112, 4, true, false};
  params.background = {1.0, 1.0, 1.0};
  params.theoretical = false;
  params.domain_radius = 1.2;
  return params;
}

std::vector<Image> render_references(const Scene& scene,
                                     const RenderParams& params,
                                     std::uint64_t seed, int n_threads) {
  std::vector<Image> images;
  images.reserve(scene.cameras.size());
  for (std::size_t v = 0; v < scene.cameras.size(); ++v) {
    images.push_back(render_image(*scene.udf, *scene.color, scene.cameras[v],
                                  params, mix64(seed) + v, n_threads));
  }
  return images;
}

void write_cameras_file(const std::string& path,
                        const std::vector<Camera>& cameras) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_cameras_file: cannot open " + path);
  out.precision(17);
  out << cameras.size() << "\n";
  for (const Camera& cam : cameras) {
    out << cam.fx << " " << cam.fy << " " << cam.cx << " " << cam.cy << " "
        << cam.width << " " << cam.height << "\n";
    for (int i = 0; i < 3; ++i) {
      out << cam.rotation(i, 0) << " " << cam.rotation(i, 1) << " "
          << cam.rotation(i, 2) << " " << cam.translation[i] << "\n";
    }
  }
  if (!out) throw std::runtime_error("write_cameras_file: write failed");
}

std::vector<Camera> read_cameras_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_cameras_file: cannot open " + path);
  std::size_t n = 0;
  in >> n;
  std::vector<Camera> cameras(n);
  for (std::size_t v = 0; v < n; ++v) {
    Camera& cam = cameras[v];
    in >> cam.fx >> cam.fy >> cam.cx >> cam.cy >> cam.width >> cam.height;
    for (int i = 0; i < 3; ++i)
      in >> cam.rotation(i, 0) >> cam.rotation(i, 1) >> cam.rotation(i, 2) >>
          cam.translation[i];
    if (!in)
      throw std::runtime_error("read_cameras_file: truncated file " + path);
    cam.validate();
  }
  return cameras;
}

namespace {

std::string view_name(std::size_t i) {
  std::ostringstream ss;
  ss << "view_" << std::setw(3) << std::setfill('0') << i << ".ppm";
  return ss.str();
}

}  // namespace

void save_scene_bundle(const std::string& dir, const Scene& scene,
                       const std::vector<Image>& images,
                       const PointCloud& ground_truth) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_cameras_file((fs::path(dir) / "cameras.txt").string(), scene.cameras);
  write_ply((fs::path(dir) / "gt.ply").string(), ground_truth);
  for (std::size_t i = 0; i < images.size(); ++i)
    write_ppm((fs::path(dir) / view_name(i)).string(), images[i]);
}

SceneBundle load_scene_bundle(const std::string& dir) {
  namespace fs = std::filesystem;
  SceneBundle bundle;
  bundle.cameras =
      read_cameras_file((fs::path(dir) / "cameras.txt").string());
  bundle.images.reserve(bundle.cameras.size());
  for (std::size_t i = 0; i < bundle.cameras.size(); ++i)
    bundle.images.push_back(read_ppm((fs::path(dir) / view_name(i)).string()));
  const fs::path gt = fs::path(dir) / "gt.ply";
  if (fs::exists(gt)) bundle.ground_truth = read_ply(gt.string());
  return bundle;
}

}  // namespace udfr
