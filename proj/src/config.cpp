// SPDX-License-Identifier: Apache-2.0
#include "udfr/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace udfr {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

struct Entry {
  std::function<std::string(const Config&)> get;
  std::function<void(Config&, const std::string&)> set;
};

template <typename T>
std::string to_str(const T& v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

template <>
std::string to_str<bool>(const bool& v) {
  return v ? "true" : "false";
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

long parse_long(const std::string& s) {
  std::size_t used = 0;
  const long v = std::stol(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad integer: " + s);
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "on") return true;
  if (s == "false" || s == "0" || s == "off") return false;
  throw std::invalid_argument("bad boolean: " + s);
}

using Registry = std::map<std::string, Entry>;

const Registry& registry() {
  static const Registry reg = [] {
    Registry r;
#define UDFR_DBL(KEY, FIELD)                                            \
  r[KEY] = {[](const Config& c) { return to_str(c.FIELD); },            \
            [](Config& c, const std::string& v) { c.FIELD = parse_double(v); }}
#define UDFR_INT(KEY, FIELD)                                              \
  r[KEY] = {[](const Config& c) { return to_str(c.FIELD); },              \
            [](Config& c, const std::string& v) {                         \
              c.FIELD = static_cast<decltype(c.FIELD)>(parse_long(v));    \
            }}
#define UDFR_BOOL(KEY, FIELD)                                           \
  r[KEY] = {[](const Config& c) { return to_str(c.FIELD); },            \
            [](Config& c, const std::string& v) { c.FIELD = parse_bool(v); }}
#define UDFR_STR(KEY, FIELD)                                     \
  r[KEY] = {[](const Config& c) { return c.FIELD; },             \
            [](Config& c, const std::string& v) { c.FIELD = v; }}

    UDFR_DBL("density.s", density.s);
    UDFR_DBL("density.c", density.c);
    UDFR_DBL("density.beta", density.beta);

    UDFR_INT("sampling.n_uniform", sampling.n_uniform);
    UDFR_INT("sampling.per_iter", sampling.per_iter);
    UDFR_INT("sampling.iters", sampling.iters);
    UDFR_BOOL("sampling.ahs", sampling.ahs);
    UDFR_BOOL("sampling.deterministic", sampling.deterministic);
    UDFR_DBL("sampling.domain_radius", sampling.domain_radius);

    UDFR_INT("train.iterations", train.iterations);
    UDFR_INT("train.batch", train.batch);
    UDFR_DBL("train.lr", train.lr);
    UDFR_DBL("train.lambda_eik", train.lambda_eik);
    UDFR_DBL("train.lambda_reg", train.lambda_reg);
    UDFR_DBL("train.lambda_s", train.lambda_s);
    UDFR_DBL("train.tau", train.tau);
    UDFR_BOOL("train.use_s_penalty", train.use_s_penalty);
    UDFR_DBL("train.s_init", train.s_init);
    UDFR_DBL("train.raw_init", train.raw_init);
    UDFR_INT("train.grid_res", train.grid_res);
    UDFR_INT("train.color_res", train.color_res);
    UDFR_INT("train.eik_points", train.eik_points);
    UDFR_INT("train.log_every", train.log_every);

    UDFR_INT("extract.pixel_stride", extract.pixel_stride);
    UDFR_DBL("extract.fg_threshold", extract.fg_threshold);
    UDFR_DBL("extract.roi_radius", extract.roi_radius);
    UDFR_INT("extract.n_uniform", extract.n_uniform);
    UDFR_INT("extract.per_iter", extract.per_iter);
    UDFR_INT("extract.iters", extract.iters);

    UDFR_INT("scene.views", scene.views);
    UDFR_INT("scene.image_size", scene.image_size);
    UDFR_DBL("scene.camera_radius", scene.camera_radius);
    UDFR_DBL("scene.camera_focal", scene.camera_focal);
    UDFR_DBL("scene.elevation_deg", scene.elevation_deg);
    UDFR_DBL("scene.surface_radius", scene.surface_radius);
    UDFR_STR("scene.color_scheme", scene.color_scheme);
    UDFR_INT("scene.ref_per_iter", scene.ref_per_iter);
    UDFR_INT("scene.gt_points", scene.gt_points);
    UDFR_DBL("scene.background", scene.background);

#undef UDFR_DBL
#undef UDFR_INT
#undef UDFR_BOOL
#undef UDFR_STR
    return r;
  }();
  return reg;
}

}  // namespace

void Config::validate() const {
  density_params().validate();
  if (sampling.n_uniform < 2 || sampling.per_iter < 1 || sampling.iters < 1)
    throw std::invalid_argument("config: bad sampling counts");
  if (sampling.domain_radius <= 0)
    throw std::invalid_argument("config: domain_radius must be > 0");
  if (train.iterations < 1 || train.batch < 1)
    throw std::invalid_argument("config: bad train counts");
  if (train.lr <= 0) throw std::invalid_argument("config: lr must be > 0");
  if (train.lambda_eik < 0 || train.lambda_reg < 0 || train.lambda_s < 0)
    throw std::invalid_argument("config: loss weights must be >= 0");
  if (train.s_init <= 0)
    throw std::invalid_argument("config: s_init must be > 0");
  if (train.grid_res < 2 || train.color_res < 2)
    throw std::invalid_argument("config: grid resolutions must be >= 2");
  if (extract.pixel_stride < 1)
    throw std::invalid_argument("config: pixel_stride must be >= 1");
  if (extract.fg_threshold <= 0 || extract.fg_threshold >= 1)
    throw std::invalid_argument("config: fg_threshold must be in (0,1)");
  if (scene.views < 1 || scene.image_size < 1)
    throw std::invalid_argument("config: bad scene counts");
  if (scene.color_scheme != "constant" && scene.color_scheme != "checker")
    throw std::invalid_argument("config: unknown color scheme");
  if (scene.surface_radius <= 0 || scene.surface_radius >= 1)
    throw std::invalid_argument("config: surface_radius must be in (0,1)");
  if (scene.camera_radius <= 1)
    throw std::invalid_argument("config: camera_radius must be > 1");
  if (scene.background < 0 || scene.background > 1)
    throw std::invalid_argument("config: background must be in [0,1]");
}

DensityParams Config::density_params() const {
  return {density.s, density.c, density.beta};
}

SamplingConfig Config::sampling_config() const {
  return {sampling.n_uniform, sampling.per_iter, sampling.iters, sampling.ahs,
          sampling.deterministic};
}

ExtractionConfig Config::extraction_config(std::uint64_t seed) const {
  ExtractionConfig ec;
  ec.pixel_stride = extract.pixel_stride;
  ec.fg_threshold = extract.fg_threshold;
  ec.roi_radius = extract.roi_radius;
  ec.sampling =
      SamplingConfig{extract.n_uniform, extract.per_iter, extract.iters, true,
                     sampling.deterministic};
  ec.seed = seed;
  return ec;
}

LossWeights Config::loss_weights() const {
  return {train.lambda_eik, train.lambda_reg, train.lambda_s, train.tau,
          train.use_s_penalty};
}

FitConfig Config::fit_config(std::uint64_t seed, int threads) const {
  FitConfig fc;
  fc.grid_res = train.grid_res;
  fc.color_res = train.color_res;
  fc.iterations = train.iterations;
  fc.batch = train.batch;
  fc.lr = train.lr;
  fc.loss = loss_weights();
  fc.c = density.c;
  fc.beta = density.beta;
  fc.sampling = sampling_config();
  fc.s_init = train.s_init;
  fc.raw_init = train.raw_init;
  fc.eik_points = train.eik_points;
  fc.background = Vec3{scene.background, scene.background, scene.background};
  fc.domain_radius = sampling.domain_radius;
  fc.seed = seed;
  fc.threads = threads;
  fc.log_every = train.log_every;
  return fc;
}

SceneOptions Config::scene_options() const {
  SceneOptions so;
  so.surface_radius = scene.surface_radius;
  so.color_scheme = scene.color_scheme;
  so.n_views = scene.views;
  so.image_size = scene.image_size;
  so.camera_radius = scene.camera_radius;
  so.camera_focal = scene.camera_focal;
  so.elevation_deg = scene.elevation_deg;
  return so;
}

void apply_config_line(Config& config, const std::string& section,
                       const std::string& key, const std::string& value) {
  const std::string full = section.empty() ? key : section + "." + key;
  const auto it = registry().find(full);
  if (it == registry().end())
    throw std::invalid_argument("config: unknown key '" + full + "'");
  it->second.set(config, value);
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path);
  Config config;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("load_config: bad line " +
                               std::to_string(line_no) + " in " + path);
    try {
      apply_config_line(config, section, trim(line.substr(0, eq)),
                        trim(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::runtime_error("load_config: line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  config.validate();
  return config;
}

std::string dump_config(const Config& config) {
  std::ostringstream out;
  std::string last_section;
  for (const auto& [key, entry] : registry()) {
    const auto dot = key.find('.');
    const std::string section = key.substr(0, dot);
    if (section != last_section) {
      if (!last_section.empty()) out << "\n";
      out << "[" << section << "]\n";
      last_section = section;
    }
    out << key.substr(dot + 1) << " = " << entry.get(config) << "\n";
  }
  return out.str();
}

void save_config(const std::string& path, const Config& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_config: cannot open " + path);
  out << dump_config(config);
  if (!out) throw std::runtime_error("save_config: write failed for " + path);
}

}  // namespace udfr
