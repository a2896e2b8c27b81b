// SPDX-License-Identifier: Apache-2.0
#include "udfr/extract.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "udfr/parallel.hpp"
#include "udfr/render.hpp"

namespace udfr {

void ExtractionConfig::validate() const {
  if (pixel_stride < 1)
    throw std::invalid_argument("ExtractionConfig: pixel_stride must be >= 1");
  if (fg_threshold <= 0.0 || fg_threshold >= 1.0)
    throw std::invalid_argument(
        "ExtractionConfig: fg_threshold must be in (0,1)");
  if (roi_radius <= 0.0)
    throw std::invalid_argument("ExtractionConfig: roi_radius must be > 0");
}

bool classify_ray_foreground(const RaySamples& samples, const Ray& ray,
                             const Vec3& roi_center, double roi_radius,
                             double threshold) {
  const double r2 = roi_radius * roi_radius;
  double in_roi = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (norm2(ray.at(samples.t[i]) - roi_center) <= r2) in_roi += samples.w[i];
  }
  return in_roi > threshold;  // strict, per the 0.5 boundary convention
}

Vec3 max_weight_point(const RaySamples& samples, const Ray& ray) {
  if (samples.size() == 0 || samples.w.size() != samples.size())
    throw std::invalid_argument("max_weight_point: weights not populated");
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples.w[i] > samples.w[best]) best = i;  // ties keep the smaller t
  return ray.at(samples.t[best]);
}

ExtractionResult extract_point_cloud(const UdfField& field,
                                     const std::vector<Camera>& cameras,
                                     const DensityParams& params,
                                     const ExtractionConfig& config,
                                     int n_threads) {
  if (cameras.empty())
    throw std::invalid_argument("extract_point_cloud: needs >= 1 camera");
  config.validate();
  params.validate();

  ExtractionResult result;
  for (std::size_t cam_id = 0; cam_id < cameras.size(); ++cam_id) {
    const Camera& cam = cameras[cam_id];
    cam.validate();

    std::vector<std::pair<int, int>> pixels;
    for (int py = config.pixel_stride / 2; py < cam.height;
         py += config.pixel_stride)
      for (int px = config.pixel_stride / 2; px < cam.width;
           px += config.pixel_stride)
        pixels.emplace_back(px, py);

    std::vector<Vec3> points(pixels.size());
    std::vector<std::uint8_t> keep(pixels.size(), 0);
    std::vector<double> max_w(pixels.size(), 0.0);

    parallel_for(pixels.size(), n_threads, [&](std::size_t i) {
      Rng rng = make_rng(config.seed,
                         cam_id * 0x10000ull + static_cast<std::uint64_t>(i));
      Ray ray = pixel_ray(cam, pixels[i].first, pixels[i].second);
      // restrict sampling to the ROI chord so the in-ROI weight sum matches
      // the classification rule
      if (!clip_to_sphere(ray, config.roi_center, config.roi_radius)) return;
      RaySamples rs =
          hierarchical_sample(field, ray, params, config.sampling, rng);
      std::vector<double> sigma(rs.size());
      for (std::size_t j = 0; j < rs.size(); ++j)
        sigma[j] = modified_density(rs.f[j], params);
      compute_weights(sigma, rs.delta, rs.alpha, rs.trans, rs.w);
      max_w[i] = *std::max_element(rs.w.begin(), rs.w.end());
      if (classify_ray_foreground(rs, ray, config.roi_center,
                                  config.roi_radius, config.fg_threshold)) {
        points[i] = max_weight_point(rs, ray);
        keep[i] = 1;
      }
    });

    ExtractionReportRow row;
    row.camera_id = static_cast<int>(cam_id);
    row.rays_cast = static_cast<long>(pixels.size());
    double w_sum = 0.0;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      w_sum += max_w[i];
      if (keep[i]) {
        result.cloud.points.push_back(points[i]);
        ++row.foreground;
      }
    }
    row.mean_max_weight = pixels.empty() ? 0.0 : w_sum / pixels.size();
    result.report.push_back(row);
  }
  return result;
}

void write_extraction_report(const std::string& path,
                             const std::vector<ExtractionReportRow>& rows) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_extraction_report: cannot open " + path);
  out << "camera_id,rays_cast,foreground,mean_max_weight\n";
  out.precision(9);
  for (const auto& row : rows)
    out << row.camera_id << "," << row.rays_cast << "," << row.foreground
        << "," << row.mean_max_weight << "\n";
}

}  // namespace udfr
