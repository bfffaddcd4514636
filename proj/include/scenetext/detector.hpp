#pragma once

// Edge/morphology text-line detector: gradient or edge mask, horizontal
// closing, connected-component shape filtering, box expansion, and a
// multi-scale pyramid whose detections are merged in original coordinates.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "scenetext/errors.hpp"
#include "scenetext/geometry.hpp"
#include "scenetext/image.hpp"
#include "scenetext/imgproc.hpp"

namespace scenetext {

enum class EdgeMethod { sobel, morph_gradient, canny };
enum class ColorMode { gray, rgb };

struct KernelSize {
  int w = 1;
  int h = 1;
  friend bool operator==(const KernelSize&, const KernelSize&) = default;
};

struct DetectorConfig {
  EdgeMethod edge_method = EdgeMethod::morph_gradient;
  ColorMode color_mode = ColorMode::rgb;
  bool multi_scale = true;

  // Closing kernels for Sobel/Canny edges and for morphological gradients.
  KernelSize close_single_sobel_canny{17, 5};
  KernelSize close_single_morph{11, 5};
  KernelSize close_multi_sobel_canny{15, 3};
  KernelSize close_multi_morph{9, 3};

  int canny_low = 50;
  int canny_high = 200;

  double min_area_fraction = 0.001;
  int min_height_px = 17;
  double max_height_fraction = 0.25;
  double min_aspect_ratio = 1.3;
  double extent_threshold = 0.4;
  double raw_edge_extent_factor = 0.3;

  double expand_left_factor = 0.1;
  double expand_all_factor = 0.05;

  double pyramid_factor = 1.4;
  int pyramid_min_side = 200;
  double overlap_merge_threshold = 0.80;

  KernelSize close_kernel(bool multi) const noexcept {
    const bool morph = edge_method == EdgeMethod::morph_gradient;
    if (multi) return morph ? close_multi_morph : close_multi_sobel_canny;
    return morph ? close_single_morph : close_single_sobel_canny;
  }

  double raw_extent_threshold() const noexcept { return raw_edge_extent_factor * extent_threshold; }
};

inline std::string_view to_string(EdgeMethod m) noexcept {
  switch (m) {
    case EdgeMethod::sobel: return "sobel";
    case EdgeMethod::morph_gradient: return "morph";
    case EdgeMethod::canny: return "canny";
  }
  return "?";
}

inline std::string_view to_string(ColorMode c) noexcept {
  return c == ColorMode::gray ? "gray" : "rgb";
}

// Throws ConfigError when a field is out of range or the edge/color pair is
// unsupported (Canny is grayscale-only).
inline void validate(const DetectorConfig& cfg) {
  auto fraction = [](double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in (0, 1]");
  };
  if (cfg.edge_method == EdgeMethod::canny && cfg.color_mode == ColorMode::rgb) {
    throw ConfigError("canny edges are computed on grayscale only; use --color gray");
  }
  for (const auto& k : {cfg.close_single_sobel_canny, cfg.close_single_morph, cfg.close_multi_sobel_canny,
                        cfg.close_multi_morph}) {
    if (k.w < 1 || k.h < 1) throw ConfigError("closing kernels must be at least 1x1");
  }
  fraction(cfg.min_area_fraction, "min_area_fraction");
  fraction(cfg.max_height_fraction, "max_height_fraction");
  fraction(cfg.extent_threshold, "extent_threshold");
  fraction(cfg.raw_edge_extent_factor, "raw_edge_extent_factor");
  fraction(cfg.expand_left_factor, "expand_left_factor");
  fraction(cfg.expand_all_factor, "expand_all_factor");
  fraction(cfg.overlap_merge_threshold, "overlap_merge_threshold");
  if (cfg.min_height_px < 1) throw ConfigError("min_height_px must be positive");
  if (!(cfg.min_aspect_ratio > 0.0)) throw ConfigError("min_aspect_ratio must be positive");
  if (!(cfg.pyramid_factor > 1.0)) throw ConfigError("pyramid_factor must exceed 1");
  if (cfg.pyramid_min_side < 1) throw ConfigError("pyramid_min_side must be positive");
}

struct TextRegion {
  Box bbox;
  int scale_index = 0;
  double weighted_extent = 0.0;

  friend bool operator==(const TextRegion&, const TextRegion&) = default;
};

enum class RejectReason { none, area, height, aspect, extent };

inline std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::area: return "area";
    case RejectReason::height: return "height";
    case RejectReason::aspect: return "aspect";
    case RejectReason::extent: return "extent";
  }
  return "?";
}

struct FilterDecision {
  RejectReason rejected_by = RejectReason::none;
  double weighted_extent = 0.0;

  bool accepted() const noexcept { return rejected_by == RejectReason::none; }
};

// Wall-clock milliseconds spent in each detector stage.
struct DetectionProfile {
  double edge_ms = 0.0;
  double close_ms = 0.0;
  double components_ms = 0.0;
  double filter_ms = 0.0;
  double pyramid_ms = 0.0;
  double merge_ms = 0.0;
  double total_ms = 0.0;
};

struct PyramidLevel {
  int level = 0;
  int width = 0;
  int height = 0;
  double scale_x = 1.0;  // original width / level width
  double scale_y = 1.0;

  friend bool operator==(const PyramidLevel&, const PyramidLevel&) = default;
};

namespace detail {

class StageClock {
 public:
  explicit StageClock(double* sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  StageClock(const StageClock&) = delete;
  StageClock& operator=(const StageClock&) = delete;
  ~StageClock() {
    if (sink_) {
      *sink_ += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }
  }

 private:
  double* sink_;
  std::chrono::steady_clock::time_point start_;
};

inline double* stage(DetectionProfile* p, double DetectionProfile::*field) {
  return p ? &(p->*field) : nullptr;
}

// Round half away from zero; the epsilon absorbs representation error in
// products such as 0.05 * 10.
inline int round_half_away(double v) {
  return static_cast<int>(v < 0 ? -std::floor(-v + 0.5 + 1e-9) : std::floor(v + 0.5 + 1e-9));
}

// Extent test with the log-aspect alternative: passes when extent >= t or
// ln(ar) * extent >= t.
inline bool extent_passes(double extent, double log_ar, double threshold) noexcept {
  return extent >= threshold || log_ar * extent >= threshold;
}

}  // namespace detail

// Binary edge mask: horizontal gradient (max over channels in RGB mode)
// thresholded with Otsu, or Canny edges on the grayscale image.
inline BinaryMask compute_edge_mask(const RasterImage& img, const DetectorConfig& cfg) {
  if (cfg.edge_method == EdgeMethod::canny && cfg.color_mode == ColorMode::rgb) {
    throw ConfigError("canny edges are computed on grayscale only");
  }
  const bool rgb = cfg.color_mode == ColorMode::rgb && img.channels() == 3;
  if (cfg.edge_method == EdgeMethod::canny) {
    return img.channels() == 3 ? canny(to_grayscale(img), cfg.canny_low, cfg.canny_high)
                               : canny(img, cfg.canny_low, cfg.canny_high);
  }
  const auto method = cfg.edge_method == EdgeMethod::sobel ? GradientMethod::sobel : GradientMethod::morph;
  if (rgb) return otsu_threshold(max_channel_gx(img, method));
  const RasterImage gray = img.channels() == 3 ? to_grayscale(img) : img;
  return otsu_threshold(method == GradientMethod::sobel ? sobel_gx(gray) : morph_gradient_gx(gray));
}

// Shape tests in fixed order: area, height, aspect ratio, extent. The extent
// test requires both the closed-mask extent (threshold T) and the raw edge
// extent inside the same box (threshold raw_edge_extent_factor * T).
inline FilterDecision filter_component(const ComponentStats& stats, const IntegralMask& raw_edges, int img_w,
                                       int img_h, const DetectorConfig& cfg) {
  const Box& b = stats.bbox;
  const double image_area = static_cast<double>(img_w) * img_h;
  if (static_cast<double>(stats.area) < cfg.min_area_fraction * image_area) return {RejectReason::area};

  const double max_h = cfg.max_height_fraction * std::min(img_w, img_h);
  if (b.h < cfg.min_height_px || static_cast<double>(b.h) > max_h) return {RejectReason::height};

  const double ar = static_cast<double>(b.w) / b.h;
  if (ar < cfg.min_aspect_ratio) return {RejectReason::aspect};

  const double box_area = static_cast<double>(b.area());
  const double log_ar = std::log(ar);
  const double closed_extent = static_cast<double>(stats.area) / box_area;
  const double raw_extent = static_cast<double>(raw_edges.count(b)) / box_area;
  if (!detail::extent_passes(closed_extent, log_ar, cfg.extent_threshold) ||
      !detail::extent_passes(raw_extent, log_ar, cfg.raw_extent_threshold())) {
    return {RejectReason::extent, log_ar * closed_extent};
  }
  return {RejectReason::none, log_ar * closed_extent};
}

inline FilterDecision filter_component(const ComponentStats& stats, const BinaryMask& raw_edges, int img_w,
                                       int img_h, const DetectorConfig& cfg) {
  return filter_component(stats, IntegralMask(raw_edges), img_w, img_h, cfg);
}

// Grows a box left by expand_left_factor * h, then on every side by
// expand_all_factor * h (h measured before expansion); clipped to the image.
inline TextRegion expand_box(TextRegion region, int img_w, int img_h, const DetectorConfig& cfg) {
  Box b = region.bbox;
  const int left = detail::round_half_away(cfg.expand_left_factor * b.h);
  b.x -= left;
  b.w += left;
  const int all = detail::round_half_away(cfg.expand_all_factor * b.h);
  b.x -= all;
  b.y -= all;
  b.w += 2 * all;
  b.h += 2 * all;
  region.bbox = clip(b, img_w, img_h);
  return region;
}

// One pass of the detector on `img`. Boxes are in img's own frame.
inline std::vector<TextRegion> detect_single_scale(const RasterImage& img, const DetectorConfig& cfg,
                                                   int scale_index = 0, DetectionProfile* profile = nullptr) {
  BinaryMask edges;
  {
    detail::StageClock clock(detail::stage(profile, &DetectionProfile::edge_ms));
    edges = compute_edge_mask(img, cfg);
  }
  BinaryMask closed;
  {
    detail::StageClock clock(detail::stage(profile, &DetectionProfile::close_ms));
    const auto k = cfg.close_kernel(cfg.multi_scale);
    closed = morph_close(edges, k.w, k.h);
  }
  Components cc;
  {
    detail::StageClock clock(detail::stage(profile, &DetectionProfile::components_ms));
    cc = connected_components(closed);
  }

  detail::StageClock clock(detail::stage(profile, &DetectionProfile::filter_ms));
  std::vector<TextRegion> out;
  if (cc.stats.empty()) return out;
  const IntegralMask raw(edges);
  for (const auto& s : cc.stats) {
    const auto decision = filter_component(s, raw, img.width(), img.height(), cfg);
    if (!decision.accepted()) continue;
    out.push_back(expand_box({s.bbox, scale_index, decision.weighted_extent}, img.width(), img.height(), cfg));
  }
  return out;
}

// Level 0 is the original image; each further level shrinks the previous one
// by pyramid_factor (dimensions rounded) and is kept only while its smaller
// side is at least pyramid_min_side.
inline std::vector<PyramidLevel> build_pyramid_plan(int img_w, int img_h, const DetectorConfig& cfg) {
  if (!(cfg.pyramid_factor > 1.0)) throw ConfigError("pyramid_factor must exceed 1");
  std::vector<PyramidLevel> plan{{0, img_w, img_h, 1.0, 1.0}};
  int w = img_w;
  int h = img_h;
  while (true) {
    const auto [nw, nh] = downsampled_size(w, h, cfg.pyramid_factor);
    if (std::min(nw, nh) < cfg.pyramid_min_side) break;
    w = nw;
    h = nh;
    plan.push_back({static_cast<int>(plan.size()), w, h, static_cast<double>(img_w) / w,
                    static_cast<double>(img_h) / h});
  }
  return plan;
}

// Maps a box from a pyramid level back to original-image pixels.
inline Box to_original(const Box& b, const PyramidLevel& level, int img_w, int img_h) {
  const int x0 = detail::round_half_away(b.x * level.scale_x);
  const int y0 = detail::round_half_away(b.y * level.scale_y);
  const int x1 = detail::round_half_away(b.right() * level.scale_x);
  const int y1 = detail::round_half_away(b.bottom() * level.scale_y);
  Box out = clip(Box{x0, y0, std::max(x1 - x0, 1), std::max(y1 - y0, 1)}, img_w, img_h);
  if (out.empty()) out = clip(Box{std::min(x0, img_w - 1), std::min(y0, img_h - 1), 1, 1}, img_w, img_h);
  return out;
}

// Removes every region contained in, or overlapping by more than `threshold`
// (intersection over the smaller area) with, a larger region. Regions are
// visited by descending area; the result is sorted by (y, x, w, h).
inline std::vector<TextRegion> merge_detections(std::vector<TextRegion> regions, double threshold = 0.80) {
  std::stable_sort(regions.begin(), regions.end(), [](const TextRegion& a, const TextRegion& b) {
    if (a.bbox.area() != b.bbox.area()) return a.bbox.area() > b.bbox.area();
    return std::tie(a.bbox.y, a.bbox.x, a.bbox.w, a.bbox.h, a.scale_index) <
           std::tie(b.bbox.y, b.bbox.x, b.bbox.w, b.bbox.h, b.scale_index);
  });
  std::vector<TextRegion> kept;
  for (const auto& r : regions) {
    const bool drop = std::any_of(kept.begin(), kept.end(), [&](const TextRegion& k) {
      return contains(k.bbox, r.bbox) || overlap_ratio(k.bbox, r.bbox) > threshold;
    });
    if (!drop) kept.push_back(r);
  }
  std::sort(kept.begin(), kept.end(), [](const TextRegion& a, const TextRegion& b) {
    return std::tie(a.bbox.y, a.bbox.x, a.bbox.w, a.bbox.h, a.scale_index) <
           std::tie(b.bbox.y, b.bbox.x, b.bbox.w, b.bbox.h, b.scale_index);
  });
  return kept;
}

// Single-scale detection at every pyramid level with the multi-scale kernels.
// Thresholds are evaluated in each level's own pixel frame.
inline std::vector<TextRegion> detect_multi_scale(const RasterImage& img, DetectorConfig cfg,
                                                  DetectionProfile* profile = nullptr) {
  cfg.multi_scale = true;
  const auto plan = build_pyramid_plan(img.width(), img.height(), cfg);
  std::vector<TextRegion> all;
  RasterImage level_img;
  for (const auto& level : plan) {
    if (level.level > 0) {
      detail::StageClock clock(detail::stage(profile, &DetectionProfile::pyramid_ms));
      level_img = resize_bilinear(level.level == 1 ? img : level_img, level.width, level.height);
    }
    const RasterImage& src = level.level == 0 ? img : level_img;
    for (auto r : detect_single_scale(src, cfg, level.level, profile)) {
      r.bbox = to_original(r.bbox, level, img.width(), img.height());
      all.push_back(r);
    }
  }
  detail::StageClock clock(detail::stage(profile, &DetectionProfile::merge_ms));
  return merge_detections(std::move(all), cfg.overlap_merge_threshold);
}

// Runs the configured single- or multi-scale detector.
inline std::vector<TextRegion> detect(const RasterImage& img, const DetectorConfig& cfg,
                                      DetectionProfile* profile = nullptr) {
  validate(cfg);
  const auto start = std::chrono::steady_clock::now();
  auto regions = cfg.multi_scale ? detect_multi_scale(img, cfg, profile) : detect_single_scale(img, cfg, 0, profile);
  if (profile) {
    profile->total_ms +=
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return regions;
}

// Top-to-bottom lines, left-to-right within a line.
inline std::vector<TextRegion> sort_reading_order(std::vector<TextRegion> regions) {
  return sort_by_reading_order(std::move(regions), &TextRegion::bbox);
}

}  // namespace scenetext
