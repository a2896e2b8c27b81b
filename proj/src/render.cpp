// SPDX-License-Identifier: Apache-2.0
#include "udfr/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "udfr/parallel.hpp"

namespace udfr {

Vec3 CheckerColor::color(const Vec3& p) const {
  const auto cell = [this](double v) {
    return static_cast<long>(std::floor(v / period_));
  };
  const long parity = (cell(p.x) + cell(p.y) + cell(p.z)) & 1;
  return parity == 0 ? a_ : b_;
}

ColorGrid::ColorGrid(int nx, int ny, int nz, const Aabb& bounds,
                     const Vec3& fill)
    : shape_(nx, ny, nz, bounds) {
  values_.resize(3 * shape_.node_count());
  for (std::size_t n = 0; n < shape_.node_count(); ++n) {
    values_[3 * n] = fill.x;
    values_[3 * n + 1] = fill.y;
    values_[3 * n + 2] = fill.z;
  }
}

Vec3 ColorGrid::color(const Vec3& p) const {
  const VoxelGrid::Stencil st = shape_.stencil(p);
  Vec3 rgb;
  for (int c = 0; c < 8; ++c) {
    const double* v = &values_[3 * st.idx[c]];
    rgb.x += st.w[c] * v[0];
    rgb.y += st.w[c] * v[1];
    rgb.z += st.w[c] * v[2];
  }
  return {std::clamp(rgb.x, 0.0, 1.0), std::clamp(rgb.y, 0.0, 1.0),
          std::clamp(rgb.z, 0.0, 1.0)};
}

void compute_weights(const std::vector<double>& sigma,
                     const std::vector<double>& delta,
                     std::vector<double>& alpha, std::vector<double>& trans,
                     std::vector<double>& w) {
  const std::size_t n = sigma.size();
  if (delta.size() != n)
    throw std::invalid_argument("compute_weights: sigma/delta size mismatch");
  alpha.resize(n);
  trans.resize(n);
  w.resize(n);
  double t_acc = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sigma[i] < 0.0)
      throw std::invalid_argument("compute_weights: negative sigma");
    if (delta[i] <= 0.0)
      throw std::invalid_argument("compute_weights: non-positive delta");
    alpha[i] = -std::expm1(-sigma[i] * delta[i]);
    trans[i] = t_acc;
    w[i] = t_acc * alpha[i];
    t_acc *= 1.0 - alpha[i];
  }
}

RayRender render_ray(const UdfField& field, const ColorField& color,
                     const Ray& ray, const RenderParams& params, Rng& rng) {
  RayRender out;
  Ray clipped = ray;
  if (!clip_to_sphere(clipped, params.domain_center, params.domain_radius)) {
    out.rgb = params.background;
    return out;
  }
  out.hit_domain = true;

  RaySamples rs =
      hierarchical_sample(field, clipped, params.density, params.sampling, rng);
  const std::size_t n = rs.size();

  rs.sigma.resize(n);
  if (params.theoretical) {
    rs.grad.resize(n);
    Vec3 prev_grad{0, 0, 1};
    for (std::size_t i = 0; i < n; ++i) {
      Vec3 g = field.gradient(clipped.at(rs.t[i]));
      if (norm(g) < kDegenerateGradNorm) g = prev_grad;  // degenerate: reuse
      prev_grad = g;
      rs.grad[i] = g;
      const double cos_theta = dot(normalized(g), clipped.direction);
      rs.sigma[i] = theoretical_density(rs.f[i], cos_theta, params.density.s);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      rs.sigma[i] = modified_density(rs.f[i], params.density);
  }

  compute_weights(rs.sigma, rs.delta, rs.alpha, rs.trans, rs.w);

  Vec3 rgb;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rgb += color.color(clipped.at(rs.t[i])) * rs.w[i];
    weight_sum += rs.w[i];
  }
  rgb += params.background * (1.0 - weight_sum);

  out.rgb = {std::clamp(rgb.x, 0.0, 1.0), std::clamp(rgb.y, 0.0, 1.0),
             std::clamp(rgb.z, 0.0, 1.0)};
  out.weight_sum = weight_sum;
  out.samples = std::move(rs);
  return out;
}

Image render_image(const UdfField& field, const ColorField& color,
                   const Camera& camera, const RenderParams& params,
                   std::uint64_t seed, int n_threads) {
  camera.validate();
  Image img(camera.width, camera.height);
  const std::size_t n_pixels =
      static_cast<std::size_t>(camera.width) * camera.height;
  parallel_for(n_pixels, n_threads, [&](std::size_t p) {
    const int px = static_cast<int>(p % camera.width);
    const int py = static_cast<int>(p / camera.width);
    Rng rng = make_rng(seed, p);
    const Ray ray = pixel_ray(camera, px, py);
    const RayRender r = render_ray(field, color, ray, params, rng);
    double* out = img.pixel(px, py);
    out[0] = r.rgb.x;
    out[1] = r.rgb.y;
    out[2] = r.rgb.z;
  });
  return img;
}

void write_ppm(const std::string& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<unsigned char> row(3 * image.width);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double* px = image.pixel(x, y);
      for (int c = 0; c < 3; ++c) {
        const double v = std::clamp(px[c], 0.0, 1.0);
        row[3 * x + c] = static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!out) throw std::runtime_error("write_ppm: write failed for " + path);
}

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_ppm: cannot open " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255)
    throw std::runtime_error("read_ppm: unsupported PPM header in " + path);
  in.get();  // single whitespace after maxval
  Image img(w, h);
  std::vector<unsigned char> buf(3 * static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!in) throw std::runtime_error("read_ppm: truncated pixel data in " + path);
  for (std::size_t i = 0; i < buf.size(); ++i)
    img.rgb[i] = buf[i] / 255.0;
  return img;
}

}  // namespace udfr
