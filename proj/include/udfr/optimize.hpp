// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "udfr/density.hpp"
#include "udfr/fields.hpp"
#include "udfr/geometry.hpp"
#include "udfr/render.hpp"
#include "udfr/sampling.hpp"

namespace udfr {

struct LossWeights {
  double lambda_eik = 0.1;
  double lambda_reg = 0.01;
  double lambda_s = 0.001;
  double tau = 5.0;
  bool use_s_penalty = true;
};

// mean absolute difference over all channels and rays (L1)
double color_loss(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt);

// mean over points of (|grad f| - 1)^2
double eikonal_loss(const UdfField& field, const std::vector<Vec3>& points);

// mean of exp(-tau * f) over all samples
double reg_loss(const std::vector<double>& f_values, double tau);

// mean of reciprocals of the per-sample sharpness values
double s_penalty(const std::vector<double>& s_values);

double total_loss(double color, double eik, double reg, double s_pen,
                  const LossWeights& weights);

struct LossBreakdown {
  double color = 0.0, eik = 0.0, reg = 0.0, s_pen = 0.0, total = 0.0;
};

struct HistoryRow {
  long iteration = 0;
  LossBreakdown loss;
  double s = 0.0;
};

// Learnable state: raw UDF grid, RGB color grid, and log(s). s is stored in
// log space so positivity is structural.
struct TrainState {
  VoxelGrid grid;  // raw, pre-softplus values
  ColorGrid color;
  double log_s = 0.0;
  double c = 5.0;
  double beta = 100.0;

  std::vector<double> m_grid, v_grid;
  std::vector<double> m_color, v_color;
  double m_log_s = 0.0, v_log_s = 0.0;
  long iteration = 0;
  std::vector<HistoryRow> history;

  TrainState(int grid_res, int color_res, const Aabb& bounds, double raw_init,
             double color_init, double s_init, double c_, double beta_);

  double s() const;
  DensityParams density() const { return {s(), c, beta}; }
  SoftplusGridUdf field() const { return SoftplusGridUdf(grid, beta); }
};

struct Gradients {
  std::vector<double> grid;   // per raw grid node
  std::vector<double> color;  // 3 per color node
  double log_s = 0.0;

  void resize_like(const TrainState& state);
  void zero();
  void add(const Gradients& other);
  bool all_finite() const;
};

// One ray of a training batch with frozen sample positions. Sampling is
// treated as non-differentiable: gradients flow through densities and colors
// at these fixed points only.
struct RayTask {
  Vec3 origin, direction;
  std::vector<double> t, delta;
  Vec3 gt;
  bool hit_domain = true;  // rays that miss the domain contribute bg only
};

// Draws a batch of pixel rays from the views, runs hierarchical sampling at
// the current s, and freezes the positions.
std::vector<RayTask> sample_batch(const TrainState& state,
                                  const std::vector<Camera>& cameras,
                                  const std::vector<Image>& images,
                                  int batch_size, const SamplingConfig& cfg,
                                  const Vec3& domain_center,
                                  double domain_radius, std::uint64_t seed,
                                  long iteration, int n_threads = 1);

// Forward pass on frozen sample positions; pure in the parameters, so it
// doubles as the objective for finite-difference checks.
LossBreakdown forward_batch(const TrainState& state,
                            const std::vector<RayTask>& tasks,
                            const std::vector<Vec3>& eik_points,
                            const LossWeights& weights, const Vec3& background,
                            int n_threads = 1);

// Fused forward + exact reverse-mode gradients of total_loss with respect to
// raw grid values, color values, and log(s).
Gradients backward_batch(const TrainState& state,
                         const std::vector<RayTask>& tasks,
                         const std::vector<Vec3>& eik_points,
                         const LossWeights& weights, const Vec3& background,
                         LossBreakdown* loss_out = nullptr, int n_threads = 1);

// Bias-corrected Adam update (beta1=0.9, beta2=0.999, eps=1e-8). Returns
// false and leaves the state untouched when any gradient is non-finite.
bool adam_step(TrainState& state, const Gradients& grads, double lr);

struct FitConfig {
  int grid_res = 64;
  int color_res = 64;
  Aabb bounds;  // default [-1,1]^3
  long iterations = 20000;
  int batch = 512;
  double lr = 5e-4;
  LossWeights loss;
  double c = 5.0;
  double beta = 100.0;
  SamplingConfig sampling;
  double s_init = 30.0;
  double raw_init = 0.3;
  double color_init = 0.5;
  int eik_points = 1024;
  Vec3 background{1.0, 1.0, 1.0};
  Vec3 domain_center{0.0, 0.0, 0.0};
  double domain_radius = 1.2;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: use hardware_threads()
  long log_every = 100;
};

// Gradient-descent fitting loop: ray batch -> hierarchical sampling ->
// render -> losses -> backward -> adam. Throws std::runtime_error with a
// diagnostic when the loss turns non-finite.
TrainState fit(const std::vector<Camera>& cameras,
               const std::vector<Image>& images, const FitConfig& config,
               const std::function<void(const HistoryRow&)>& on_log = {});

// Checkpoint files: <prefix>.grid (raw UDF), <prefix>.{r,g,b}.grid (color
// channels), <prefix>.meta (text: s, iteration, loss, c, beta).
void save_checkpoint(const std::string& prefix, const TrainState& state);
struct Checkpoint {
  VoxelGrid grid;
  ColorGrid color;
  double s = 0.0;
  double c = 5.0;
  double beta = 100.0;
  long iteration = 0;
  double last_loss = 0.0;
};
Checkpoint load_checkpoint(const std::string& prefix);

void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& history);

}  // namespace udfr
