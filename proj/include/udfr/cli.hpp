// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "udfr/config.hpp"

namespace udfr {

// Exit codes: 0 success. run_verify returns 1 when any claim fails and 2 on
// I/O errors; the other commands return 1 on any failure. All commands remove
// partially written outputs on failure.

int run_verify(const Config& config, const std::string& csv_path);

int run_make_scene(const std::string& name, const std::string& out_dir,
                   const Config& config, std::uint64_t seed, int threads);

int run_fit(const std::string& scene_dir, const Config& config,
            const std::string& out_prefix, std::uint64_t seed, int threads);

int run_extract(const std::string& checkpoint_prefix,
                const std::string& cameras_path, const std::string& out_ply,
                const std::string& report_csv, const Config& config,
                std::uint64_t seed, int threads);

int run_render(const std::string& scene_name,
               const std::string& checkpoint_prefix,
               const std::string& cameras_path, int camera_index,
               const std::string& out_ppm, const Config& config,
               std::uint64_t seed, int threads);

int run_eval(const std::string& ply_path, const std::string& gt_ply_path,
             int threads);

}  // namespace udfr
