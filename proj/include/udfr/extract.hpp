// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "udfr/density.hpp"
#include "udfr/fields.hpp"
#include "udfr/geometry.hpp"
#include "udfr/sampling.hpp"

namespace udfr {

struct ExtractionConfig {
  int pixel_stride = 5;
  double fg_threshold = 0.5;
  Vec3 roi_center{0.0, 0.0, 0.0};
  double roi_radius = 1.0;
  // per-ray sampling at extraction time; defaults give 64 + 4*48 = 256
  SamplingConfig sampling{64, 48, 4, true, false};
  std::uint64_t seed = 0;

  void validate() const;
};

// Foreground iff the sum of weights of samples inside the ROI sphere is
// strictly greater than the threshold.
bool classify_ray_foreground(const RaySamples& samples, const Ray& ray,
                             const Vec3& roi_center, double roi_radius,
                             double threshold);

// Position of the maximum-weight sample; ties resolve to the smallest t
// (nearest the camera).
Vec3 max_weight_point(const RaySamples& samples, const Ray& ray);

struct ExtractionReportRow {
  int camera_id = 0;
  long rays_cast = 0;
  long foreground = 0;
  double mean_max_weight = 0.0;
};

struct ExtractionResult {
  PointCloud cloud;
  std::vector<ExtractionReportRow> report;
};

// Casts rays every pixel_stride pixels in both axes of every camera, clips
// them to the ROI sphere, samples hierarchically, and keeps the max-weight
// point of every foreground ray.
ExtractionResult extract_point_cloud(const UdfField& field,
                                     const std::vector<Camera>& cameras,
                                     const DensityParams& params,
                                     const ExtractionConfig& config,
                                     int n_threads = 1);

void write_extraction_report(const std::string& path,
                             const std::vector<ExtractionReportRow>& rows);

}  // namespace udfr
