// SPDX-License-Identifier: Apache-2.0
#include "udfr/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "udfr/parallel.hpp"

namespace udfr {

double color_loss(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt) {
  if (pred.size() != gt.size() || pred.empty())
    throw std::invalid_argument("color_loss: batches must match and be non-empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sum += std::abs(pred[i].x - gt[i].x) + std::abs(pred[i].y - gt[i].y) +
           std::abs(pred[i].z - gt[i].z);
  }
  return sum / (3.0 * pred.size());
}

double eikonal_loss(const UdfField& field, const std::vector<Vec3>& points) {
  if (points.empty())
    throw std::invalid_argument("eikonal_loss: needs at least one point");
  double sum = 0.0;
  for (const Vec3& p : points) {
    const double n = norm(field.gradient(p));
    sum += (n - 1.0) * (n - 1.0);
  }
  return sum / points.size();
}

double reg_loss(const std::vector<double>& f_values, double tau) {
  if (f_values.empty()) return 0.0;
  double sum = 0.0;
  for (double f : f_values) sum += std::exp(-tau * f);
  return sum / f_values.size();
}

double s_penalty(const std::vector<double>& s_values) {
  if (s_values.empty()) return 0.0;
  double sum = 0.0;
  for (double s : s_values) {
    if (s <= 0.0) throw std::invalid_argument("s_penalty: s must be positive");
    sum += 1.0 / s;
  }
  return sum / s_values.size();
}

double total_loss(double color, double eik, double reg, double s_pen,
                  const LossWeights& weights) {
  double total = color + weights.lambda_eik * eik + weights.lambda_reg * reg;
  if (weights.use_s_penalty) total += weights.lambda_s * s_pen;
  return total;
}

// ---------------------------------------------------------------------------
// TrainState / Gradients

TrainState::TrainState(int grid_res, int color_res, const Aabb& bounds,
                       double raw_init, double color_init, double s_init,
                       double c_, double beta_)
    : grid(grid_res, grid_res, grid_res, bounds, raw_init),
      color(color_res, color_res, color_res, bounds,
            Vec3{color_init, color_init, color_init}),
      log_s(std::log(s_init)),
      c(c_),
      beta(beta_) {
  if (s_init <= 0.0)
    throw std::invalid_argument("TrainState: s_init must be positive");
  m_grid.assign(grid.node_count(), 0.0);
  v_grid.assign(grid.node_count(), 0.0);
  m_color.assign(color.values().size(), 0.0);
  v_color.assign(color.values().size(), 0.0);
}

double TrainState::s() const { return std::exp(log_s); }

void Gradients::resize_like(const TrainState& state) {
  grid.assign(state.grid.node_count(), 0.0);
  color.assign(state.color.values().size(), 0.0);
  log_s = 0.0;
}

void Gradients::zero() {
  std::fill(grid.begin(), grid.end(), 0.0);
  std::fill(color.begin(), color.end(), 0.0);
  log_s = 0.0;
}

void Gradients::add(const Gradients& other) {
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] += other.grid[i];
  for (std::size_t i = 0; i < color.size(); ++i) color[i] += other.color[i];
  log_s += other.log_s;
}

bool Gradients::all_finite() const {
  if (!std::isfinite(log_s)) return false;
  for (double g : grid)
    if (!std::isfinite(g)) return false;
  for (double g : color)
    if (!std::isfinite(g)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Batch sampling

std::vector<RayTask> sample_batch(const TrainState& state,
                                  const std::vector<Camera>& cameras,
                                  const std::vector<Image>& images,
                                  int batch_size, const SamplingConfig& cfg,
                                  const Vec3& domain_center,
                                  double domain_radius, std::uint64_t seed,
                                  long iteration, int n_threads) {
  if (cameras.empty() || cameras.size() != images.size())
    throw std::invalid_argument("sample_batch: cameras/images mismatch");
  const SoftplusGridUdf field = state.field();
  const DensityParams params = state.density();
  std::vector<RayTask> tasks(batch_size);
  parallel_for(batch_size, n_threads, [&](std::size_t j) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(iteration) *
                                 static_cast<std::uint64_t>(batch_size) +
                             j);
    const std::size_t view =
        std::uniform_int_distribution<std::size_t>(0, cameras.size() - 1)(rng);
    const Camera& cam = cameras[view];
    const int px = std::uniform_int_distribution<int>(0, cam.width - 1)(rng);
    const int py = std::uniform_int_distribution<int>(0, cam.height - 1)(rng);

    RayTask& task = tasks[j];
    const double* gt = images[view].pixel(px, py);
    task.gt = {gt[0], gt[1], gt[2]};
    Ray ray = pixel_ray(cam, px, py);
    task.origin = ray.origin;
    task.direction = ray.direction;
    if (!clip_to_sphere(ray, domain_center, domain_radius)) {
      task.hit_domain = false;
      return;
    }
    RaySamples rs = hierarchical_sample(field, ray, params, cfg, rng);
    task.t = std::move(rs.t);
    task.delta = std::move(rs.delta);
  });
  return tasks;
}

// ---------------------------------------------------------------------------
// Forward / backward core

namespace {

struct RayScratch {
  std::vector<VoxelGrid::Stencil> gst, cst;
  std::vector<double> raw, f, sigma, alpha, trans, w;
  std::vector<Vec3> rgb;  // clamped sample colors
  std::vector<Vec3> unclamped;

  void resize(std::size_t n) {
    gst.resize(n);
    cst.resize(n);
    raw.resize(n);
    f.resize(n);
    sigma.resize(n);
    alpha.resize(n);
    trans.resize(n);
    w.resize(n);
    rgb.resize(n);
    unclamped.resize(n);
  }
};

// Shared forward for one ray; fills scratch and returns the predicted color.
Vec3 forward_ray(const TrainState& state, const RayTask& task,
                 const Vec3& background, RayScratch& sc) {
  const std::size_t n = task.t.size();
  sc.resize(n);
  const double s = state.s();
  const auto& grid_vals = state.grid.values;
  const auto& color_vals = state.color.values();

  Vec3 pred;
  double weight_acc = 0.0;
  double t_acc = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 pos = task.origin + task.direction * task.t[i];
    sc.gst[i] = state.grid.stencil(pos);
    double raw = 0.0;
    for (int k = 0; k < 8; ++k) raw += sc.gst[i].w[k] * grid_vals[sc.gst[i].idx[k]];
    sc.raw[i] = raw;
    sc.f[i] = softplus(raw, state.beta);
    sc.sigma[i] = state.c * s * logistic_tail(s * sc.f[i]);

    sc.cst[i] = state.color.geometry().stencil(pos);
    Vec3 rgb;
    for (int k = 0; k < 8; ++k) {
      const double* v = &color_vals[3 * sc.cst[i].idx[k]];
      rgb.x += sc.cst[i].w[k] * v[0];
      rgb.y += sc.cst[i].w[k] * v[1];
      rgb.z += sc.cst[i].w[k] * v[2];
    }
    sc.unclamped[i] = rgb;
    sc.rgb[i] = {std::clamp(rgb.x, 0.0, 1.0), std::clamp(rgb.y, 0.0, 1.0),
                 std::clamp(rgb.z, 0.0, 1.0)};

    sc.alpha[i] = -std::expm1(-sc.sigma[i] * task.delta[i]);
    sc.trans[i] = t_acc;
    sc.w[i] = t_acc * sc.alpha[i];
    t_acc *= 1.0 - sc.alpha[i];

    pred += sc.rgb[i] * sc.w[i];
    weight_acc += sc.w[i];
  }
  pred += background * (1.0 - weight_acc);
  return pred;
}

struct BatchAccum {
  double color_sum = 0.0;  // sum of |pred-gt| over channels
  double reg_sum = 0.0;    // sum of exp(-tau f) over samples
  std::size_t n_samples = 0;
};

}  // namespace

LossBreakdown forward_batch(const TrainState& state,
                            const std::vector<RayTask>& tasks,
                            const std::vector<Vec3>& eik_points,
                            const LossWeights& weights, const Vec3& background,
                            int n_threads) {
  if (tasks.empty()) throw std::invalid_argument("forward_batch: empty batch");
  const int workers = n_threads <= 0 ? hardware_threads() : n_threads;
  std::vector<BatchAccum> acc(std::max(workers, 1));
  parallel_chunks(
      tasks.size(), workers, [&](int w, std::size_t begin, std::size_t end) {
        RayScratch sc;
        for (std::size_t r = begin; r < end; ++r) {
          const RayTask& task = tasks[r];
          const Vec3 pred = task.hit_domain
                                ? forward_ray(state, task, background, sc)
                                : background;
          acc[w].color_sum += std::abs(pred.x - task.gt.x) +
                              std::abs(pred.y - task.gt.y) +
                              std::abs(pred.z - task.gt.z);
          if (task.hit_domain) {
            for (std::size_t i = 0; i < task.t.size(); ++i)
              acc[w].reg_sum += std::exp(-weights.tau * sc.f[i]);
            acc[w].n_samples += task.t.size();
          }
        }
      });
  BatchAccum total;
  for (const auto& a : acc) {
    total.color_sum += a.color_sum;
    total.reg_sum += a.reg_sum;
    total.n_samples += a.n_samples;
  }

  LossBreakdown out;
  out.color = total.color_sum / (3.0 * tasks.size());
  const SoftplusGridUdf field = state.field();
  out.eik = eik_points.empty() ? 0.0 : eikonal_loss(field, eik_points);
  out.reg = total.n_samples == 0 ? 0.0 : total.reg_sum / total.n_samples;
  out.s_pen = weights.use_s_penalty ? 1.0 / state.s() : 0.0;
  out.total = total_loss(out.color, out.eik, out.reg, out.s_pen, weights);
  return out;
}

Gradients backward_batch(const TrainState& state,
                         const std::vector<RayTask>& tasks,
                         const std::vector<Vec3>& eik_points,
                         const LossWeights& weights, const Vec3& background,
                         LossBreakdown* loss_out, int n_threads) {
  if (tasks.empty()) throw std::invalid_argument("backward_batch: empty batch");
  const int workers = n_threads <= 0 ? hardware_threads() : n_threads;
  const double s = state.s();
  const double n_rays = static_cast<double>(tasks.size());

  // total sample count is needed up front to normalize the regularizer
  std::size_t n_samples = 0;
  for (const auto& task : tasks)
    if (task.hit_domain) n_samples += task.t.size();

  std::vector<Gradients> grads(std::max(workers, 1));
  std::vector<BatchAccum> acc(std::max(workers, 1));
  for (auto& g : grads) g.resize_like(state);

  parallel_chunks(tasks.size(), workers, [&](int wk, std::size_t begin,
                                             std::size_t end) {
    RayScratch sc;
    Gradients& g = grads[wk];
    for (std::size_t r = begin; r < end; ++r) {
      const RayTask& task = tasks[r];
      if (!task.hit_domain) {
        acc[wk].color_sum += std::abs(background.x - task.gt.x) +
                             std::abs(background.y - task.gt.y) +
                             std::abs(background.z - task.gt.z);
        continue;
      }
      const Vec3 pred = forward_ray(state, task, background, sc);
      acc[wk].color_sum += std::abs(pred.x - task.gt.x) +
                           std::abs(pred.y - task.gt.y) +
                           std::abs(pred.z - task.gt.z);
      acc[wk].n_samples += task.t.size();

      // dL/dC per channel; L1 subgradient at zero residual is 0
      const auto sgn = [](double x) {
        return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
      };
      const Vec3 dldc{sgn(pred.x - task.gt.x) / (3.0 * n_rays),
                      sgn(pred.y - task.gt.y) / (3.0 * n_rays),
                      sgn(pred.z - task.gt.z) / (3.0 * n_rays)};

      const std::size_t n = task.t.size();
      double d_trans = 0.0;  // dL/dT_{i+1} accumulator, swept back to front
      double ds_local = 0.0;
      for (std::size_t ii = n; ii-- > 0;) {
        acc[wk].reg_sum += std::exp(-weights.tau * sc.f[ii]);

        // color scatter: dL/dc_i = dL/dC * w_i (zero where the clamp is active)
        const Vec3& uc = sc.unclamped[ii];
        const double dcx = (uc.x > 0.0 && uc.x < 1.0) ? dldc.x * sc.w[ii] : 0.0;
        const double dcy = (uc.y > 0.0 && uc.y < 1.0) ? dldc.y * sc.w[ii] : 0.0;
        const double dcz = (uc.z > 0.0 && uc.z < 1.0) ? dldc.z * sc.w[ii] : 0.0;
        for (int k = 0; k < 8; ++k) {
          double* dst = &g.color[3 * sc.cst[ii].idx[k]];
          dst[0] += dcx * sc.cst[ii].w[k];
          dst[1] += dcy * sc.cst[ii].w[k];
          dst[2] += dcz * sc.cst[ii].w[k];
        }

        // dL/dw_i = dL/dC . (c_i - bg)
        const double a_i = dldc.x * (sc.rgb[ii].x - background.x) +
                           dldc.y * (sc.rgb[ii].y - background.y) +
                           dldc.z * (sc.rgb[ii].z - background.z);
        // compositing reverse: w_i = T_i alpha_i, T_{i+1} = T_i (1 - alpha_i)
        const double d_alpha = sc.trans[ii] * (a_i - d_trans);
        d_trans = sc.alpha[ii] * a_i + (1.0 - sc.alpha[ii]) * d_trans;

        const double d_sigma =
            d_alpha * task.delta[ii] *
            std::exp(-sc.sigma[ii] * task.delta[ii]);

        // sigma = c s L(s f);  dL(u)/du = -L(1-L)
        const double lt = logistic_tail(s * sc.f[ii]);
        const double lp = -lt * (1.0 - lt);
        double df = d_sigma * state.c * s * s * lp;
        ds_local += d_sigma * state.c * (lt + s * sc.f[ii] * lp);

        // iso-surface regularizer, mean over all samples in the batch
        df += weights.lambda_reg * (-weights.tau) *
              std::exp(-weights.tau * sc.f[ii]) / n_samples;

        const double draw = df * softplus_grad(sc.raw[ii], state.beta);
        for (int k = 0; k < 8; ++k)
          g.grid[sc.gst[ii].idx[k]] += draw * sc.gst[ii].w[k];
      }
      g.log_s += ds_local * s;  // chain through s = exp(log_s)
    }
  });

  // Eikonal term on its own point set
  double eik_loss = 0.0;
  if (!eik_points.empty()) {
    const std::size_t n_pts = eik_points.size();
    std::vector<double> eik_partial(std::max(workers, 1), 0.0);
    parallel_chunks(n_pts, workers, [&](int wk, std::size_t begin,
                                        std::size_t end) {
      Gradients& g = grads[wk];
      for (std::size_t p = begin; p < end; ++p) {
        const VoxelGrid::Stencil st = state.grid.stencil(eik_points[p]);
        double raw = 0.0;
        Vec3 raw_grad;
        for (int k = 0; k < 8; ++k) {
          raw += st.w[k] * state.grid.values[st.idx[k]];
          raw_grad += st.dw[k] * state.grid.values[st.idx[k]];
        }
        const double sg = softplus_grad(raw, state.beta);
        const Vec3 grad_f = raw_grad * sg;
        const double nrm = norm(grad_f);
        eik_partial[wk] += (nrm - 1.0) * (nrm - 1.0);
        if (nrm < 1e-12) continue;  // subgradient 0 at the cone point
        const double coef = weights.lambda_eik * 2.0 * (nrm - 1.0) / n_pts;
        const Vec3 dg = grad_f * (coef / nrm);
        const Vec3 d_raw_grad = dg * sg;
        const double d_raw =
            dot(dg, raw_grad) * state.beta * sg * (1.0 - sg);
        for (int k = 0; k < 8; ++k)
          g.grid[st.idx[k]] += d_raw * st.w[k] + dot(d_raw_grad, st.dw[k]);
      }
    });
    for (double e : eik_partial) eik_loss += e;
    eik_loss /= n_pts;
  }

  Gradients total = std::move(grads[0]);
  for (std::size_t w = 1; w < grads.size(); ++w) total.add(grads[w]);

  // s penalty: L_s = 1/s  ->  dL/ds = -1/s^2
  if (weights.use_s_penalty)
    total.log_s += weights.lambda_s * (-1.0 / (s * s)) * s;

  if (loss_out) {
    BatchAccum sum;
    for (const auto& a : acc) {
      sum.color_sum += a.color_sum;
      sum.reg_sum += a.reg_sum;
      sum.n_samples += a.n_samples;
    }
    loss_out->color = sum.color_sum / (3.0 * tasks.size());
    loss_out->eik = eik_loss;
    loss_out->reg = sum.n_samples == 0 ? 0.0 : sum.reg_sum / sum.n_samples;
    loss_out->s_pen = weights.use_s_penalty ? 1.0 / s : 0.0;
    loss_out->total = total_loss(loss_out->color, loss_out->eik, loss_out->reg,
                                 loss_out->s_pen, weights);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Adam

bool adam_step(TrainState& state, const Gradients& grads, double lr) {
  if (!grads.all_finite()) return false;
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  state.iteration += 1;
  const double t = static_cast<double>(state.iteration);
  const double corr1 = 1.0 - std::pow(b1, t);
  const double corr2 = 1.0 - std::pow(b2, t);

  const auto update = [&](double& p, double& m, double& v, double g) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    p -= lr * (m / corr1) / (std::sqrt(v / corr2) + eps);
  };

  for (std::size_t i = 0; i < state.grid.values.size(); ++i)
    update(state.grid.values[i], state.m_grid[i], state.v_grid[i], grads.grid[i]);
  auto& cvals = state.color.values();
  for (std::size_t i = 0; i < cvals.size(); ++i)
    update(cvals[i], state.m_color[i], state.v_color[i], grads.color[i]);
  update(state.log_s, state.m_log_s, state.v_log_s, grads.log_s);
  return true;
}

// ---------------------------------------------------------------------------
// Fit loop

TrainState fit(const std::vector<Camera>& cameras,
               const std::vector<Image>& images, const FitConfig& config,
               const std::function<void(const HistoryRow&)>& on_log) {
  if (cameras.size() < 2)
    throw std::invalid_argument("fit: needs at least two views");
  if (cameras.size() != images.size())
    throw std::invalid_argument("fit: cameras/images mismatch");
  for (std::size_t i = 0; i < cameras.size(); ++i)
    if (images[i].width != cameras[i].width ||
        images[i].height != cameras[i].height)
      throw std::invalid_argument("fit: image size mismatch with camera");

  const int threads =
      config.threads <= 0 ? hardware_threads() : config.threads;
  TrainState state(config.grid_res, config.color_res, config.bounds,
                   config.raw_init, config.color_init, config.s_init, config.c,
                   config.beta);

  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Vec3> eik_pts(config.eik_points);

  for (long it = 0; it < config.iterations; ++it) {
    auto tasks = sample_batch(state, cameras, images, config.batch,
                              config.sampling, config.domain_center,
                              config.domain_radius, config.seed, it, threads);
    Rng eik_rng = make_rng(config.seed ^ 0x15CA1EDull, it);
    for (auto& p : eik_pts)
      p = {unit(eik_rng), unit(eik_rng), unit(eik_rng)};

    LossBreakdown loss;
    const Gradients grads =
        backward_batch(state, tasks, eik_pts, config.loss, config.background,
                       &loss, threads);
    if (!std::isfinite(loss.total)) {
      std::ostringstream msg;
      msg << "fit: non-finite loss at iteration " << it << " (color="
          << loss.color << " eik=" << loss.eik << " reg=" << loss.reg
          << " s=" << state.s() << ")";
      throw std::runtime_error(msg.str());
    }
    if (!adam_step(state, grads, config.lr)) {
      std::ostringstream msg;
      msg << "fit: non-finite gradient at iteration " << it;
      throw std::runtime_error(msg.str());
    }

    if (it % config.log_every == 0 || it + 1 == config.iterations) {
      HistoryRow row{it, loss, state.s()};
      state.history.push_back(row);
      if (on_log) on_log(row);
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// Checkpoints

void save_checkpoint(const std::string& prefix, const TrainState& state) {
  save_grid(prefix + ".grid", state.grid);
  const VoxelGrid& shape = state.color.geometry();
  VoxelGrid channel(shape.nx, shape.ny, shape.nz, shape.bounds);
  const char* names[3] = {".r.grid", ".g.grid", ".b.grid"};
  for (int ch = 0; ch < 3; ++ch) {
    for (std::size_t n = 0; n < shape.node_count(); ++n)
      channel.values[n] = state.color.values()[3 * n + ch];
    save_grid(prefix + names[ch], channel);
  }
  std::ofstream meta(prefix + ".meta");
  if (!meta)
    throw std::runtime_error("save_checkpoint: cannot open " + prefix + ".meta");
  meta.precision(17);
  meta << "s " << state.s() << "\n";
  meta << "iteration " << state.iteration << "\n";
  meta << "loss "
       << (state.history.empty() ? 0.0 : state.history.back().loss.total)
       << "\n";
  meta << "c " << state.c << "\n";
  meta << "beta " << state.beta << "\n";
}

Checkpoint load_checkpoint(const std::string& prefix) {
  Checkpoint ck;
  ck.grid = load_grid(prefix + ".grid");
  const VoxelGrid r = load_grid(prefix + ".r.grid");
  const VoxelGrid g = load_grid(prefix + ".g.grid");
  const VoxelGrid b = load_grid(prefix + ".b.grid");
  ck.color = ColorGrid(r.nx, r.ny, r.nz, r.bounds, Vec3{});
  for (std::size_t n = 0; n < r.node_count(); ++n) {
    ck.color.values()[3 * n] = r.values[n];
    ck.color.values()[3 * n + 1] = g.values[n];
    ck.color.values()[3 * n + 2] = b.values[n];
  }
  std::ifstream meta(prefix + ".meta");
  if (!meta)
    throw std::runtime_error("load_checkpoint: cannot open " + prefix + ".meta");
  std::string key;
  double value;
  while (meta >> key >> value) {
    if (key == "s") ck.s = value;
    else if (key == "iteration") ck.iteration = static_cast<long>(value);
    else if (key == "loss") ck.last_loss = value;
    else if (key == "c") ck.c = value;
    else if (key == "beta") ck.beta = value;
  }
  if (ck.s <= 0.0)
    throw std::runtime_error("load_checkpoint: missing or invalid s in meta");
  return ck;
}

void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& history) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_history_csv: cannot open " + path);
  out << "iteration,loss_color,loss_eik,loss_reg,loss_s,loss_total,s\n";
  out.precision(12);
  for (const auto& row : history) {
    out << row.iteration << "," << row.loss.color << "," << row.loss.eik << ","
        << row.loss.reg << "," << row.loss.s_pen << "," << row.loss.total
        << "," << row.s << "\n";
  }
}

}  // namespace udfr
