// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "udfr/cli.hpp"
#include "udfr/parallel.hpp"

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("UDFR_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      std::cerr << "warning: ignoring malformed UDFR_SEED\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsigned-distance-field volume rendering and reconstruction"};
  app.require_subcommand(1);

  std::uint64_t seed = default_seed();
  int threads = udfr::hardware_threads();
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("--seed", seed, "Random seed (fallback: UDFR_SEED env var)");
  app.add_option("--threads", threads, "Worker threads (default: all cores)");
  app.add_option("--config", config_path, "Config file (key = value sections)");
  app.add_option("--set", overrides,
                 "Config overrides, e.g. --set density.c=5");

  auto load = [&]() {
    udfr::Config cfg;
    if (!config_path.empty()) cfg = udfr::load_config(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--set expects section.key=value: " + kv);
      const std::string full = kv.substr(0, eq);
      const auto dot = full.find('.');
      if (dot == std::string::npos)
        throw std::invalid_argument("--set expects section.key=value: " + kv);
      udfr::apply_config_line(cfg, full.substr(0, dot), full.substr(dot + 1),
                              kv.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
  };

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Check the density/sampling claims, write a CSV report");
  std::string verify_csv = "verify.csv";
  verify->add_option("-o,--output", verify_csv, "Report CSV path");

  // make-scene
  auto* make_scene =
      app.add_subcommand("make-scene", "Generate a synthetic scene bundle");
  std::string scene_name, scene_out;
  make_scene->add_option("name", scene_name,
                         "sphere-shell | disk-open | hemisphere-shell | "
                         "two-planes | rect-patch")
      ->required();
  make_scene->add_option("out", scene_out, "Output directory")->required();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit a grid UDF to a scene bundle");
  std::string fit_scene_dir, fit_out = "checkpoint";
  fit_cmd->add_option("scene", fit_scene_dir, "Scene bundle directory")
      ->required();
  fit_cmd->add_option("-o,--output", fit_out, "Checkpoint prefix");

  // extract
  auto* extract_cmd = app.add_subcommand(
      "extract", "Extract a max-weight surface point cloud from a checkpoint");
  std::string ck_prefix, cams_path, out_ply = "cloud.ply", report_csv;
  extract_cmd->add_option("checkpoint", ck_prefix, "Checkpoint prefix")
      ->required();
  extract_cmd->add_option("cameras", cams_path, "Cameras file")->required();
  extract_cmd->add_option("-o,--output", out_ply, "Output PLY path");
  extract_cmd->add_option("--report", report_csv, "Extraction report CSV");

  // render
  auto* render_cmd =
      app.add_subcommand("render", "Render one view of a scene or checkpoint");
  std::string render_scene, render_ck, render_cams, render_out = "view.ppm";
  int render_index = 0;
  render_cmd->add_option("--scene", render_scene, "Analytic scene name");
  render_cmd->add_option("--checkpoint", render_ck, "Checkpoint prefix");
  render_cmd->add_option("--cameras", render_cams,
                         "Cameras file (default: scene orbit)");
  render_cmd->add_option("--index", render_index, "Camera index");
  render_cmd->add_option("-o,--output", render_out, "Output PPM path");

  // eval
  auto* eval_cmd = app.add_subcommand(
      "eval", "Symmetric Chamfer distance between two PLY clouds");
  std::string eval_a, eval_b;
  eval_cmd->add_option("cloud", eval_a, "Reconstructed PLY")->required();
  eval_cmd->add_option("gt", eval_b, "Ground-truth PLY")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*verify) return udfr::run_verify(load(), verify_csv);
    if (*make_scene)
      return udfr::run_make_scene(scene_name, scene_out, load(), seed, threads);
    if (*fit_cmd) return udfr::run_fit(fit_scene_dir, load(), fit_out, seed, threads);
    if (*extract_cmd)
      return udfr::run_extract(ck_prefix, cams_path, out_ply, report_csv,
                               load(), seed, threads);
    if (*render_cmd)
      return udfr::run_render(render_scene, render_ck, render_cams,
                              render_index, render_out, load(), seed, threads);
    if (*eval_cmd) return udfr::run_eval(eval_a, eval_b, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
