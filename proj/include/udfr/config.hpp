// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "udfr/density.hpp"
#include "udfr/extract.hpp"
#include "udfr/optimize.hpp"
#include "udfr/sampling.hpp"
#include "udfr/scenes.hpp"

namespace udfr {

// Flat key-value configuration covering every tunable default. Text format:
// "[section]" headers with "key = value" lines; '#' starts a comment.
// Unknown keys are rejected; values are validated on load.
struct Config {
  struct Density {
    double s = 1000.0;  // evaluation-time sharpness for verify/render/extract
    double c = 5.0;
    double beta = 100.0;
  } density;

  struct Sampling {
    int n_uniform = 64;
    int per_iter = 16;
    int iters = 4;
    bool ahs = true;
    bool deterministic = false;
    double domain_radius = 1.2;
  } sampling;

  struct Train {
    long iterations = 20000;
    int batch = 512;
    double lr = 5e-4;
    double lambda_eik = 0.1;
    double lambda_reg = 0.01;
    double lambda_s = 0.001;
    double tau = 5.0;
    bool use_s_penalty = true;
    double s_init = 30.0;
    double raw_init = 0.3;
    int grid_res = 64;
    int color_res = 64;
    int eik_points = 1024;
    long log_every = 100;
  } train;

  struct Extract {
    int pixel_stride = 5;
    double fg_threshold = 0.5;
    double roi_radius = 1.0;
    int n_uniform = 64;
    int per_iter = 48;
    int iters = 4;
  } extract;

  struct SceneCfg {
    int views = 36;
    int image_size = 64;
    double camera_radius = 2.2;
    double camera_focal = 80.0;
    double elevation_deg = 30.0;
    double surface_radius = 0.8;
    std::string color_scheme = "constant";
    int ref_per_iter = 112;  // 64 + 4*112 = 512 reference samples per ray
    int gt_points = 20000;
    double background = 1.0;  // grayscale background level
  } scene;

  void validate() const;

  DensityParams density_params() const;
  SamplingConfig sampling_config() const;
  ExtractionConfig extraction_config(std::uint64_t seed) const;
  LossWeights loss_weights() const;
  FitConfig fit_config(std::uint64_t seed, int threads) const;
  SceneOptions scene_options() const;
};

Config load_config(const std::string& path);
void apply_config_line(Config& config, const std::string& section,
                       const std::string& key, const std::string& value);
std::string dump_config(const Config& config);
void save_config(const std::string& path, const Config& config);

}  // namespace udfr
