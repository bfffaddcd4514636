#pragma once

// Per-stage detector timing over a set of images.

#include <cstddef>
#include <iomanip>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenetext/dataset.hpp"
#include "scenetext/detector.hpp"
#include "scenetext/io.hpp"

namespace scenetext {

struct NamedImage {
  std::string name;
  RasterImage image;
};

struct ImageTiming {
  std::string image;
  DetectionProfile mean;
  std::vector<DetectionProfile> runs;  // one per timed repetition
  std::size_t regions = 0;
};

struct StageTimings {
  std::string label;
  int repetitions = 0;
  std::vector<ImageTiming> per_image;
  DetectionProfile summary;  // mean over images of the per-image means
  bool outputs_stable = true;  // every timed run reproduced the warm-up output
};

inline std::string config_label(const DetectorConfig& cfg) {
  return std::string(to_string(cfg.edge_method)) + "/" + std::string(to_string(cfg.color_mode)) + "/" +
         (cfg.multi_scale ? "multi" : "single");
}

namespace detail {

inline void scale_profile(DetectionProfile& p, double k) {
  p.edge_ms *= k;
  p.close_ms *= k;
  p.components_ms *= k;
  p.filter_ms *= k;
  p.pyramid_ms *= k;
  p.merge_ms *= k;
  p.total_ms *= k;
}

inline void add_profile(DetectionProfile& into, const DetectionProfile& p) {
  into.edge_ms += p.edge_ms;
  into.close_ms += p.close_ms;
  into.components_ms += p.components_ms;
  into.filter_ms += p.filter_ms;
  into.pyramid_ms += p.pyramid_ms;
  into.merge_ms += p.merge_ms;
  into.total_ms += p.total_ms;
}

}  // namespace detail

// One untimed warm-up pass per image, then `repetitions` timed passes; images
// are processed one at a time on the calling thread.
inline StageTimings run_benchmark(std::span<const NamedImage> images, const DetectorConfig& cfg, int repetitions) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
  validate(cfg);
  StageTimings out;
  out.label = config_label(cfg);
  out.repetitions = repetitions;
  for (const auto& item : images) {
    const auto reference = detect(item.image, cfg);
    ImageTiming t{item.name, {}, {}, reference.size()};
    for (int r = 0; r < repetitions; ++r) {
      DetectionProfile p;
      const auto regions = detect(item.image, cfg, &p);
      if (regions != reference) out.outputs_stable = false;
      detail::add_profile(t.mean, p);
      t.runs.push_back(p);
    }
    detail::scale_profile(t.mean, 1.0 / repetitions);
    detail::add_profile(out.summary, t.mean);
    out.per_image.push_back(std::move(t));
  }
  if (!out.per_image.empty()) detail::scale_profile(out.summary, 1.0 / static_cast<double>(out.per_image.size()));
  return out;
}

inline std::vector<NamedImage> load_images(const DatasetManifest& manifest) {
  std::vector<NamedImage> images;
  for (const auto& e : manifest.entries) images.push_back({e.image_file.filename().string(), read_image(e.image_file)});
  return images;
}

inline StageTimings run_benchmark(const DatasetManifest& manifest, const DetectorConfig& cfg, int repetitions) {
  const auto images = load_images(manifest);
  return run_benchmark(images, cfg, repetitions);
}

// Every edge-method / color / scale combination (twelve). Canny+RGB is listed
// too; callers skip it and report it as unsupported.
inline std::vector<DetectorConfig> sweep_configs(const DetectorConfig& base) {
  std::vector<DetectorConfig> out;
  for (auto color : {ColorMode::gray, ColorMode::rgb}) {
    for (auto method : {EdgeMethod::sobel, EdgeMethod::morph_gradient, EdgeMethod::canny}) {
      for (bool multi : {false, true}) {
        DetectorConfig c = base;
        c.edge_method = method;
        c.color_mode = color;
        c.multi_scale = multi;
        out.push_back(c);
      }
    }
  }
  return out;
}

inline nlohmann::ordered_json profile_json(const DetectionProfile& p) {
  return {{"edge", p.edge_ms},         {"close", p.close_ms}, {"components", p.components_ms},
          {"filter", p.filter_ms},     {"pyramid", p.pyramid_ms}, {"merge", p.merge_ms},
          {"total", p.total_ms}};
}

inline nlohmann::ordered_json timings_json(const StageTimings& t) {
  nlohmann::ordered_json doc;
  doc["config"] = t.label;
  doc["repetitions"] = t.repetitions;
  doc["images"] = t.per_image.size();
  doc["meanMs"] = profile_json(t.summary);
  auto& list = doc["perImage"] = nlohmann::ordered_json::array();
  for (const auto& i : t.per_image) {
    auto runs = nlohmann::ordered_json::array();
    for (const auto& r : i.runs) runs.push_back(profile_json(r));
    list.push_back({{"image", i.image}, {"regions", i.regions}, {"meanMs", profile_json(i.mean)}, {"runsMs", runs}});
  }
  return doc;
}

inline std::string timings_table_header() {
  std::ostringstream os;
  os << std::left << std::setw(20) << "config" << std::right;
  for (const char* h : {"edge", "close", "cc", "filter", "pyramid", "merge", "total"}) os << std::setw(9) << h;
  os << "\n";
  return os.str();
}

inline std::string timings_table_row(const StageTimings& t) {
  std::ostringstream os;
  const auto& p = t.summary;
  os << std::left << std::setw(20) << t.label << std::right << std::fixed << std::setprecision(2);
  for (double v : {p.edge_ms, p.close_ms, p.components_ms, p.filter_ms, p.pyramid_ms, p.merge_ms, p.total_ms}) {
    os << std::setw(9) << v;
  }
  os << "\n";
  return os.str();
}

}  // namespace scenetext
