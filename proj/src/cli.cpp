// SPDX-License-Identifier: Apache-2.0
#include "udfr/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "udfr/extract.hpp"
#include "udfr/optimize.hpp"
#include "udfr/parallel.hpp"
#include "udfr/scenes.hpp"
#include "udfr/verify.hpp"

namespace udfr {

namespace fs = std::filesystem;

namespace {

// Removes partially written outputs when a command fails.
struct OutputGuard {
  std::vector<fs::path> outputs;
  bool committed = false;

  void track(const std::string& path) { outputs.emplace_back(path); }
  ~OutputGuard() {
    if (committed) return;
    for (const auto& p : outputs) {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  }
};

int fail(const std::string& what, int code = 1) {
  std::cerr << "error: " << what << "\n";
  return code;
}

}  // namespace

int run_verify(const Config& config, const std::string& csv_path) {
  std::vector<VerifyRow> rows;
  try {
    config.validate();
    rows = run_verification(config.density_params());
  } catch (const std::exception& e) {
    return fail(e.what());
  }

  bool all_pass = true;
  for (const auto& row : rows) all_pass = all_pass && row.pass;

  try {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot open " + csv_path);
    out << "claim,computed,reference,status\n";
    out.precision(12);
    for (const auto& row : rows) {
      out << row.claim << "," << row.computed << ",\"" << row.reference
          << "\"," << (row.pass ? "pass" : "fail") << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + csv_path);
  } catch (const std::exception& e) {
    return fail(e.what(), 2);  // I/O failure, distinct from claim failure
  }

  for (const auto& row : rows) {
    std::cout << (row.pass ? "pass  " : "FAIL  ") << row.claim << " = "
              << row.computed << "  (" << row.reference << ")\n";
  }
  std::cout << (all_pass ? "verification passed" : "verification FAILED")
            << " (" << rows.size() << " claims, csv: " << csv_path << ")\n";
  return all_pass ? 0 : 1;
}

int run_make_scene(const std::string& name, const std::string& out_dir,
                   const Config& config, std::uint64_t seed, int threads) {
  OutputGuard guard;
  try {
    config.validate();
    guard.track(out_dir);
    const Scene scene = build_scene(name, config.scene_options());
    RenderParams params = reference_render_params();
    params.density = config.density_params();
    params.sampling.per_iter = config.scene.ref_per_iter;
    params.background = Vec3{config.scene.background, config.scene.background,
                             config.scene.background};
    params.domain_radius = config.sampling.domain_radius;
    const std::vector<Image> images =
        render_references(scene, params, seed, threads);
    const PointCloud gt = ground_truth_cloud(scene, config.scene.gt_points, seed);
    save_scene_bundle(out_dir, scene, images, gt);
    std::cout << "scene '" << name << "' written to " << out_dir << " ("
              << images.size() << " views, " << gt.size() << " gt points)\n";
    guard.committed = true;
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_fit(const std::string& scene_dir, const Config& config,
            const std::string& out_prefix, std::uint64_t seed, int threads) {
  OutputGuard guard;
  try {
    config.validate();
    const SceneBundle bundle = load_scene_bundle(scene_dir);
    const FitConfig fit_cfg = config.fit_config(seed, threads);

    long next_report = 0;
    const TrainState state =
        fit(bundle.cameras, bundle.images, fit_cfg,
            [&](const HistoryRow& row) {
              if (row.iteration >= next_report) {
                std::cout << "iter " << row.iteration << "  loss "
                          << row.loss.total << "  color " << row.loss.color
                          << "  s " << row.s << "\n";
                next_report = row.iteration + 1000;
              }
            });

    guard.track(out_prefix + ".grid");
    guard.track(out_prefix + ".r.grid");
    guard.track(out_prefix + ".g.grid");
    guard.track(out_prefix + ".b.grid");
    guard.track(out_prefix + ".meta");
    guard.track(out_prefix + ".history.csv");
    save_checkpoint(out_prefix, state);
    write_history_csv(out_prefix + ".history.csv", state.history);
    std::cout << "checkpoint written to " << out_prefix << ".{grid,meta}, s="
              << state.s() << "\n";
    guard.committed = true;
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_extract(const std::string& checkpoint_prefix,
                const std::string& cameras_path, const std::string& out_ply,
                const std::string& report_csv, const Config& config,
                std::uint64_t seed, int threads) {
  OutputGuard guard;
  try {
    config.validate();
    const Checkpoint ck = load_checkpoint(checkpoint_prefix);
    const std::vector<Camera> cameras = read_cameras_file(cameras_path);
    const SoftplusGridUdf field(ck.grid, ck.beta);
    DensityParams params{ck.s, ck.c, ck.beta};
    const ExtractionConfig ec = config.extraction_config(seed);
    const ExtractionResult result =
        extract_point_cloud(field, cameras, params, ec, threads);
    if (result.cloud.empty())
      std::cerr << "warning: zero foreground rays, writing empty cloud\n";
    guard.track(out_ply);
    write_ply(out_ply, result.cloud);
    if (!report_csv.empty()) {
      guard.track(report_csv);
      write_extraction_report(report_csv, result.report);
    }
    std::cout << "extracted " << result.cloud.size() << " points to "
              << out_ply << "\n";
    guard.committed = true;
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_render(const std::string& scene_name,
               const std::string& checkpoint_prefix,
               const std::string& cameras_path, int camera_index,
               const std::string& out_ppm, const Config& config,
               std::uint64_t seed, int threads) {
  OutputGuard guard;
  try {
    config.validate();
    RenderParams params;
    params.density = config.density_params();
    params.sampling = config.sampling_config();
    params.background = Vec3{config.scene.background, config.scene.background,
                             config.scene.background};
    params.domain_radius = config.sampling.domain_radius;

    std::shared_ptr<UdfField> field;
    std::shared_ptr<ColorField> color;
    std::vector<Camera> cameras;
    if (!scene_name.empty()) {
      Scene scene = build_scene(scene_name, config.scene_options());
      field = scene.udf;
      color = scene.color;
      cameras = scene.cameras;
    } else if (!checkpoint_prefix.empty()) {
      auto ck = std::make_shared<Checkpoint>(load_checkpoint(checkpoint_prefix));
      params.density = DensityParams{ck->s, ck->c, ck->beta};
      field = std::make_shared<SoftplusGridUdf>(ck->grid, ck->beta);
      color = std::shared_ptr<ColorField>(ck, &ck->color);
    } else {
      throw std::invalid_argument("render: needs a scene name or a checkpoint");
    }
    if (!cameras_path.empty()) cameras = read_cameras_file(cameras_path);
    if (cameras.empty())
      throw std::invalid_argument("render: no cameras available");
    if (camera_index < 0 || camera_index >= static_cast<int>(cameras.size()))
      throw std::invalid_argument("render: camera index out of range");

    const Image img = render_image(*field, *color, cameras[camera_index],
                                   params, seed, threads);
    guard.track(out_ppm);
    write_ppm(out_ppm, img);
    std::cout << "rendered view " << camera_index << " to " << out_ppm << "\n";
    guard.committed = true;
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

int run_eval(const std::string& ply_path, const std::string& gt_ply_path,
             int threads) {
  try {
    const PointCloud a = read_ply(ply_path);
    const PointCloud b = read_ply(gt_ply_path);
    const double d = chamfer(a, b, threads);
    std::printf("chamfer %.9f\n", d);
    std::printf("chamfer_x1e3 %.3f\n", d * 1e3);
    return 0;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
}

}  // namespace udfr
