#pragma once

// Character-level OCR accuracy: accuracy = (n - e) / n with the edit count
// clamped to n, aggregated over a dataset by summing characters and errors.

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scenetext/dataset.hpp"
#include "scenetext/detector.hpp"
#include "scenetext/geometry.hpp"
#include "scenetext/utf8.hpp"

namespace scenetext {

struct ImageEvalResult {
  std::string image_id;
  std::int64_t n = 0;
  std::int64_t e = 0;
  std::int64_t e_clamped = 0;
  double accuracy = 0.0;

  friend bool operator==(const ImageEvalResult&, const ImageEvalResult&) = default;
};

struct AggregateReport {
  std::vector<ImageEvalResult> per_image;
  std::int64_t total_n = 0;
  std::int64_t total_e_clamped = 0;
  double overall_accuracy = 0.0;
};

struct ScoreOptions {
  bool normalize_whitespace = true;
};

// Levenshtein distance with unit costs.
inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] != b[j - 1]);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::u32string decode_lenient(std::string_view s) {
  if (auto cps = utf8::decode(s)) return std::move(*cps);
  return *utf8::decode(utf8::sanitize(s));
}

// Distance over Unicode scalar values; malformed bytes count as U+FFFD.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  return edit_distance(decode_lenient(a), decode_lenient(b));
}

// Collapses whitespace runs to one space and trims both ends.
inline std::string normalize_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// n = 0: accuracy 1 if the OCR text is also empty, 0 otherwise.
inline ImageEvalResult score_image(std::string_view gt_text, std::string_view ocr_text, ScoreOptions opts = {},
                                   std::string image_id = {}) {
  std::string gt_norm;
  std::string ocr_norm;
  if (opts.normalize_whitespace) {
    gt_norm = normalize_text(gt_text);
    ocr_norm = normalize_text(ocr_text);
    gt_text = gt_norm;
    ocr_text = ocr_norm;
  }
  const auto gt = decode_lenient(gt_text);
  const auto ocr = decode_lenient(ocr_text);
  ImageEvalResult r;
  r.image_id = std::move(image_id);
  r.n = static_cast<std::int64_t>(gt.size());
  r.e = static_cast<std::int64_t>(edit_distance(gt, ocr));
  r.e_clamped = std::min(r.e, r.n);
  if (r.n == 0) {
    r.accuracy = r.e == 0 ? 1.0 : 0.0;
  } else {
    r.accuracy = static_cast<double>(r.n - r.e_clamped) / static_cast<double>(r.n);
  }
  return r;
}

// Character-weighted: (sum n - sum e_clamped) / sum n. When no image has
// ground-truth text, the mean per-image accuracy is reported instead.
inline AggregateReport aggregate(std::vector<ImageEvalResult> results) {
  if (results.empty()) throw std::invalid_argument("aggregate needs at least one image result");
  AggregateReport rep;
  for (const auto& r : results) {
    rep.total_n += r.n;
    rep.total_e_clamped += r.e_clamped;
  }
  if (rep.total_n > 0) {
    rep.overall_accuracy =
        static_cast<double>(rep.total_n - rep.total_e_clamped) / static_cast<double>(rep.total_n);
  } else {
    double sum = 0.0;
    for (const auto& r : results) sum += r.accuracy;
    rep.overall_accuracy = sum / static_cast<double>(results.size());
  }
  rep.per_image = std::move(results);
  return rep;
}

struct DetectionDiagnostics {
  double precision = 1.0;
  double recall = 1.0;
  std::vector<std::pair<std::size_t, std::size_t>> matched_pairs;  // (prediction, ground truth)
};

// Greedy one-to-one matching by descending IoU; pairs below the threshold are
// never matched. Empty predictions give precision 1, empty ground truth
// gives recall 1.
inline DetectionDiagnostics detection_diagnostics(std::span<const Box> predicted, std::span<const Box> truth,
                                                  double iou_threshold = 0.5) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("iou threshold must lie in (0, 1)");
  }
  struct Candidate {
    double iou;
    std::size_t p;
    std::size_t g;
  };
  std::vector<Candidate> cands;
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    for (std::size_t g = 0; g < truth.size(); ++g) {
      const double v = iou(predicted[p], truth[g]);
      if (v >= iou_threshold) cands.push_back({v, p, g});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.iou > b.iou; });
  std::vector<bool> used_p(predicted.size(), false);
  std::vector<bool> used_g(truth.size(), false);
  DetectionDiagnostics d;
  for (const auto& c : cands) {
    if (used_p[c.p] || used_g[c.g]) continue;
    used_p[c.p] = used_g[c.g] = true;
    d.matched_pairs.emplace_back(c.p, c.g);
  }
  const auto m = static_cast<double>(d.matched_pairs.size());
  d.precision = predicted.empty() ? 1.0 : m / static_cast<double>(predicted.size());
  d.recall = truth.empty() ? 1.0 : m / static_cast<double>(truth.size());
  return d;
}

inline DetectionDiagnostics detection_diagnostics(const std::vector<TextRegion>& predicted,
                                                  const GroundTruthAnnotation& gt, double iou_threshold = 0.5) {
  std::vector<Box> p;
  std::vector<Box> g;
  for (const auto& r : predicted) p.push_back(r.bbox);
  for (const auto& b : gt.boxes) g.push_back(b.box);
  return detection_diagnostics(p, g, iou_threshold);
}

inline nlohmann::ordered_json report_json(const AggregateReport& rep, bool normalized = true) {
  nlohmann::ordered_json doc;
  doc["overallAccuracy"] = rep.overall_accuracy;
  doc["totalCharacters"] = rep.total_n;
  doc["totalErrors"] = rep.total_e_clamped;
  doc["images"] = rep.per_image.size();
  doc["whitespaceNormalized"] = normalized;
  auto& list = doc["perImage"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.per_image) {
    list.push_back({{"imageId", r.image_id},
                    {"characters", r.n},
                    {"errors", r.e},
                    {"errorsClamped", r.e_clamped},
                    {"accuracy", r.accuracy}});
  }
  return doc;
}

inline std::string report_table(const AggregateReport& rep) {
  std::size_t id_w = 8;
  for (const auto& r : rep.per_image) id_w = std::max(id_w, r.image_id.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(id_w)) << "image" << std::right << std::setw(8) << "chars"
     << std::setw(8) << "errors" << std::setw(8) << "clamped" << std::setw(10) << "accuracy" << "\n";
  os << std::fixed << std::setprecision(2);
  for (const auto& r : rep.per_image) {
    os << std::left << std::setw(static_cast<int>(id_w)) << r.image_id << std::right << std::setw(8) << r.n
       << std::setw(8) << r.e << std::setw(8) << r.e_clamped << std::setw(9) << 100.0 * r.accuracy << "%\n";
  }
  os << std::left << std::setw(static_cast<int>(id_w)) << "TOTAL" << std::right << std::setw(8) << rep.total_n
     << std::setw(8) << "" << std::setw(8) << rep.total_e_clamped << std::setw(9) << 100.0 * rep.overall_accuracy
     << "%\n";
  return os.str();
}

}  // namespace scenetext
