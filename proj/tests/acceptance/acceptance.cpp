// Acceptance runner: one PASS / FAIL / SKIP line per criterion, then a
// summary line. Exits 1 if any criterion failed.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "scenetext/benchmark.hpp"
#include "scenetext/dataset.hpp"
#include "scenetext/detector.hpp"
#include "scenetext/eval.hpp"
#include "scenetext/imgproc.hpp"
#include "scenetext/io.hpp"
#include "scenetext/ocr.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace scenetext;
namespace fs = std::filesystem;

namespace {

enum class Outcome { pass, fail, skip };

struct Verdict {
  Outcome outcome;
  std::string detail;
};

Verdict check(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(double v, int digits = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

Verdict pyramid_plan() {
  const auto plan = build_pyramid_plan(1024, 576, DetectorConfig{});
  const std::vector<std::pair<int, int>> expected = {{1024, 576}, {731, 411}, {522, 294}, {373, 210}};
  std::vector<std::pair<int, int>> got;
  std::string dims;
  for (const auto& l : plan) {
    got.emplace_back(l.width, l.height);
    dims += (dims.empty() ? "" : ", ") + std::to_string(l.width) + "x" + std::to_string(l.height);
  }
  return check(got == expected, "levels " + dims);
}

Verdict otsu_oracle() {
  std::mt19937 rng(20240101);
  int agree = 0;
  for (int i = 0; i < 200; ++i) {
    const auto method = i % 4 < 2 ? GradientMethod::sobel : GradientMethod::morph;
    const auto img = oracle::random_image(rng, 64, 64, i % 2 ? 3 : 1);
    const auto g = img.channels() == 3            ? max_channel_gx(img, method)
                   : method == GradientMethod::sobel ? sobel_gx(img)
                                                     : morph_gradient_gx(img);
    agree += otsu_level(g) == oracle::otsu(g);
  }
  return check(agree == 200, std::to_string(agree) + "/200 images agree");
}

Verdict components_oracle() {
  std::mt19937 rng(20240102);
  int agree = 0;
  for (int i = 0; i < 200; ++i) {
    const int w = 1 + static_cast<int>(rng() % 64), h = 1 + static_cast<int>(rng() % 64);
    const auto m = oracle::random_mask(rng, w, h, 0.05 + 0.6 * static_cast<double>(rng() % 1000) / 1000.0);
    int count = 0;
    const auto expected = oracle::flood_fill_labels(m, count);
    const auto cc = connected_components(m);
    std::int64_t area = 0;
    for (const auto& s : cc.stats) area += s.area;
    const auto labels = cc.labels.values();
    const bool same = cc.count() == count && std::equal(labels.begin(), labels.end(), expected.begin()) &&
                      static_cast<std::size_t>(area) == count_foreground(m);
    agree += same;
  }
  return check(agree == 200, std::to_string(agree) + "/200 masks agree");
}

Verdict edit_distance_oracle() {
  const std::u32string alphabet = U"abcçdefgğhıijklmnoöprsştuüvyzÇĞİÖŞÜ ";
  std::mt19937 rng(20240103);
  auto random_string = [&] {
    std::u32string s(rng() % 13, U' ');
    for (auto& c : s) c = alphabet[rng() % alphabet.size()];
    return s;
  };
  int agree = 0, metric_ok = 0;
  for (int i = 0; i < 500; ++i) {
    const auto a = random_string(), b = random_string(), c = random_string();
    const auto d = edit_distance(a, b);
    agree += d == oracle::edit_distance(a, b) && edit_distance(utf8::encode(a), utf8::encode(b)) == d;
    metric_ok += d == edit_distance(b, a) && (d == 0) == (a == b) && edit_distance(a, c) <= d + edit_distance(b, c);
  }
  return check(agree == 500 && metric_ok == 500,
               std::to_string(agree) + "/500 pairs agree, metric properties " + std::to_string(metric_ok) + "/500");
}

Verdict accuracy_protocol() {
  // n and e by hand: 5/0, 5/2, 3/6 clamped to 3, 5/5. Totals 18 and 10.
  const auto rep = aggregate({score_image("DURAK", "DURAK", {}, "a"), score_image("ÇIKIŞ", "CIKIS", {}, "b"),
                              score_image("ABC", "XYZXYZ", {}, "c"), score_image("kitap", "", {}, "d")});
  const bool ok = rep.total_n == 18 && rep.total_e_clamped == 10 && rep.per_image[2].e == 6 &&
                  rep.per_image[2].e_clamped == 3 && rep.per_image[2].accuracy == 0.0 &&
                  rep.overall_accuracy == 8.0 / 18.0;
  return check(ok, "N=" + std::to_string(rep.total_n) + " E=" + std::to_string(rep.total_e_clamped) +
                       " accuracy=" + fmt(rep.overall_accuracy, 6));
}

Verdict synthetic_detection() {
  const DetectorConfig cfg;  // morphological gradient, RGB, multi-scale
  std::mt19937 rng(1234);
  int lines = 0, recovered = 0;
  for (int i = 0; i < 50; ++i) {
    const auto scene = synth::text_lines(rng);
    const auto regions = detect(scene.image, cfg);
    for (const auto& line : scene.lines) {
      ++lines;
      for (const auto& r : regions) {
        if (synth::coverage(r.bbox, line.truth) >= 0.9) {
          ++recovered;
          break;
        }
      }
    }
  }
  // Half plain backgrounds, half with Gaussian noise of sigma 8.
  std::mt19937 bg_rng(4321);
  int quiet = 0;
  for (int i = 0; i < 50; ++i) {
    quiet += detect(synth::background(bg_rng, 1024, 576, i % 2 ? 8.0 : 0.0), cfg).empty();
  }
  const double line_rate = static_cast<double>(recovered) / lines;
  const double quiet_rate = quiet / 50.0;
  return check(line_rate >= 0.95 && quiet_rate >= 0.90,
               "lines recovered " + std::to_string(recovered) + "/" + std::to_string(lines) + " (" +
                   fmt(100 * line_rate, 1) + "%, need 95%), empty on " + std::to_string(quiet) +
                   "/50 blank or noise images (need 90%)");
}

// Independent predicates for each shape test, evaluated without the cascade.
struct Shape {
  Box box;
  std::int64_t area;
  double raw_fill;
};

std::vector<RejectReason> failing_tests(const Shape& s, const DetectorConfig& cfg) {
  std::vector<RejectReason> out;
  const double ar = static_cast<double>(s.box.w) / s.box.h;
  const double extent = static_cast<double>(s.area) / s.box.area();
  const auto raw_count = static_cast<std::int64_t>(s.raw_fill * static_cast<double>(s.box.area()));
  const double raw_extent = static_cast<double>(raw_count) / s.box.area();
  if (s.area < 0.001 * 1024 * 576) out.push_back(RejectReason::area);
  if (s.box.h < 17 || s.box.h > 144) out.push_back(RejectReason::height);
  if (ar < 1.3) out.push_back(RejectReason::aspect);
  const double t = cfg.extent_threshold;
  const bool closed_ok = extent >= t || std::log(ar) * extent >= t;
  const bool raw_ok = raw_extent >= 0.3 * t || std::log(ar) * raw_extent >= 0.3 * t;
  if (!closed_ok || !raw_ok) out.push_back(RejectReason::extent);
  return out;
}

Verdict filter_cascade() {
  const DetectorConfig cfg;
  std::mt19937 rng(20240104);
  std::map<RejectReason, int> wanted = {{RejectReason::area, 0}, {RejectReason::height, 0},
                                        {RejectReason::aspect, 0}, {RejectReason::extent, 0}};
  int tested = 0, exact = 0, raw_only = 0;
  BinaryMask raw(1024, 576);
  while (tested < 200) {
    Shape s;
    s.box = {static_cast<int>(rng() % 200), static_cast<int>(rng() % 200), 5 + static_cast<int>(rng() % 400),
             5 + static_cast<int>(rng() % 200)};
    s.area = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint32_t>(s.box.area()));
    if (rng() % 3 == 0) s.area = s.box.area();
    s.raw_fill = rng() % 4 == 0 ? 0.02 * (rng() % 5) : 0.1 + 0.9 * (rng() % 100) / 100.0;
    const auto fails = failing_tests(s, cfg);
    if (fails.size() != 1 || wanted[fails[0]] >= 50) continue;
    ++wanted[fails[0]];
    ++tested;

    std::fill(raw.values().begin(), raw.values().end(), 0);
    const auto n = static_cast<std::int64_t>(s.raw_fill * static_cast<double>(s.box.area()));
    std::int64_t k = 0;
    for (int y = s.box.y; y < s.box.bottom() && k < n; ++y)
      for (int x = s.box.x; x < s.box.right() && k < n; ++x, ++k) raw.at(x, y) = 1;
    const double extent = static_cast<double>(s.area) / s.box.area();
    raw_only += fails[0] == RejectReason::extent && extent >= cfg.extent_threshold;

    exact += filter_component({1, s.area, s.box}, raw, 1024, 576, cfg).rejected_by == fails[0];
  }
  return check(exact == tested, std::to_string(exact) + "/" + std::to_string(tested) +
                                    " single-failure components report that test (50 per test, " +
                                    std::to_string(raw_only) + " failing only the raw edge extent)");
}

Verdict merge_postcondition() {
  std::mt19937 rng(20240105);
  int ok = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<TextRegion> in;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      in.push_back({{static_cast<int>(rng() % 300), static_cast<int>(rng() % 300), 1 + static_cast<int>(rng() % 120),
                     1 + static_cast<int>(rng() % 60)},
                    static_cast<int>(rng() % 4)});
    }
    const auto out = merge_detections(in);
    bool good = merge_detections(out) == out;
    for (std::size_t i = 0; i < out.size() && good; ++i) {
      for (std::size_t j = 0; j < out.size() && good; ++j) {
        if (i != j && (contains(out[i].bbox, out[j].bbox) || overlap_ratio(out[i].bbox, out[j].bbox) > 0.80)) {
          good = false;
        }
      }
    }
    ok += good;
  }
  return check(ok == 200, std::to_string(ok) + "/200 sets satisfy the postcondition and are fixed points");
}

Verdict performance() {
  std::mt19937 rng(20240106);
  std::vector<NamedImage> images;
  for (int i = 0; i < 20; ++i) images.push_back({"scene" + std::to_string(i), synth::text_lines(rng).image});
  DetectorConfig multi;
  DetectorConfig single;
  single.multi_scale = false;
  const auto m = run_benchmark(images, multi, 5);
  const auto s = run_benchmark(images, single, 5);
  return check(m.summary.total_ms < 100.0 && s.summary.total_ms < m.summary.total_ms,
               "multi-scale " + fmt(m.summary.total_ms) + " ms/image (limit 100), single-scale " +
                   fmt(s.summary.total_ms) + " ms/image");
}

bool has_turkish_engine() {
  if (std::system("command -v tesseract >/dev/null 2>&1") != 0) return false;
  return std::system("tesseract --list-langs 2>/dev/null | grep -qx tur") == 0;
}

Verdict mtst_end_to_end() {
  const char* root = std::getenv("MTST200_DIR");
  if (!root || !*root) return {Outcome::skip, "MTST200_DIR not set"};
  if (!has_turkish_engine()) return {Outcome::skip, "tesseract with the Turkish model not installed"};

  const auto manifest = load_manifest(root);
  if (manifest.entries.empty()) return {Outcome::fail, std::string("no annotated images under ") + root};
  const DetectorConfig cfg;
  OcrEngineConfig ocr;
  ocr.parallelism = 4;
  const ProcessEngine engine;
  std::vector<ImageEvalResult> detected, whole;
  for (const auto& e : manifest.entries) {
    const auto ann = load_annotation(e.annotation_file);
    const auto img = read_image(e.image_file);
    const auto gt = flatten_ground_truth(ann);
    const auto regions = sort_reading_order(detect(img, cfg));
    detected.push_back(score_image(gt, emit_text(recognize_regions(img, regions, engine, ocr)), {}, ann.image_id));
    whole.push_back(score_image(gt, emit_text(recognize_regions(img, {{img.bounds()}}, engine, ocr)), {}, ann.image_id));
  }
  const double det_acc = 100.0 * aggregate(detected).overall_accuracy;
  const double raw_acc = 100.0 * aggregate(whole).overall_accuracy;
  return check(std::abs(det_acc - 55.61) <= 5.0 && det_acc > raw_acc,
               "detection-fed " + fmt(det_acc) + "% (target 55.61 +/- 5), whole-image " + fmt(raw_acc) + "% over " +
                   std::to_string(manifest.entries.size()) + " images");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"pyramid plan", pyramid_plan},
      {"otsu oracle", otsu_oracle},
      {"connected components oracle", components_oracle},
      {"edit distance oracle", edit_distance_oracle},
      {"accuracy protocol", accuracy_protocol},
      {"synthetic detection", synthetic_detection},
      {"filter cascade order", filter_cascade},
      {"merge postcondition", merge_postcondition},
      {"performance envelope", performance},
      {"MTST 200 end-to-end", mtst_end_to_end},
  };
  int passed = 0, failed = 0, skipped = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {Outcome::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = v.outcome == Outcome::pass ? "PASS" : v.outcome == Outcome::fail ? "FAIL" : "SKIP";
    std::cout << tag << "  " << name << ": " << v.detail << std::endl;
    (v.outcome == Outcome::pass ? passed : v.outcome == Outcome::fail ? failed : skipped)++;
  }
  std::cout << "acceptance summary: " << passed << " passed, " << failed << " failed, " << skipped << " skipped"
            << std::endl;
  return failed ? 1 : 0;
}
