// scenetext: command-line front end for detection, recognition, evaluation,
// benchmarking and the annotation server.
//
// Exit codes: 0 success, 1 processing error (some inputs failed), 2 usage or
// configuration error, 3 accuracy below --min-accuracy.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "scenetext/annotation_service.hpp"
#include "scenetext/scenetext.hpp"

namespace fs = std::filesystem;
using namespace scenetext;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProcessing = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBelowFloor = 3;

struct DetectorFlags {
  std::string edge = "morph";
  std::string color = "rgb";
  std::string scale = "multi";

  void add_to(CLI::App* app) {
    app->add_option("--edge", edge, "Edge method")
        ->check(CLI::IsMember({"sobel", "morph", "canny"}))
        ->capture_default_str();
    app->add_option("--color", color, "Gradient color mode")
        ->check(CLI::IsMember({"gray", "rgb"}))
        ->capture_default_str();
    app->add_option("--scale", scale, "Single- or multi-scale detection")
        ->check(CLI::IsMember({"single", "multi"}))
        ->capture_default_str();
  }

  DetectorConfig config() const {
    DetectorConfig cfg;
    cfg.edge_method = edge == "sobel" ? EdgeMethod::sobel : edge == "canny" ? EdgeMethod::canny : EdgeMethod::morph_gradient;
    cfg.color_mode = color == "gray" ? ColorMode::gray : ColorMode::rgb;
    cfg.multi_scale = scale == "multi";
    validate(cfg);
    return cfg;
  }
};

// Files are taken as given; directories contribute their PNG/JPEG files in
// name order.
std::vector<fs::path> collect_images(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.is_regular_file() && is_image_file(e.path())) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.emplace_back(in);
    }
  }
  return out;
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; returns per-index error
// messages (empty on success).
template <typename Fn>
std::vector<std::string> run_batch(std::size_t n, int jobs, Fn fn) {
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return errors;
}

int report_batch_errors(const std::vector<fs::path>& images, const std::vector<std::string>& errors) {
  int failed = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!errors[i].empty()) {
      std::cerr << "error: " << images[i].string() << ": " << errors[i] << "\n";
      ++failed;
    }
  }
  return failed ? kExitProcessing : kExitOk;
}

struct DetectArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  bool viz = false;
  int jobs = 1;
  DetectorFlags det;
};

int cmd_detect(const DetectArgs& a) {
  const auto cfg = a.det.config();
  const auto images = collect_images(a.inputs);
  fs::create_directories(a.out_dir);
  const auto errors = run_batch(images.size(), a.jobs, [&](std::size_t i) {
    const auto& path = images[i];
    auto img = read_image(path);
    const auto regions = detect(img, cfg);
    const DetectionRecord rec{path.filename().string(), img.width(), img.height(), regions};
    write_file_atomic(fs::path(a.out_dir) / (path.stem().string() + ".det.json"), serialize_detections(rec));
    if (a.viz) {
      std::vector<Box> boxes;
      for (const auto& r : regions) boxes.push_back(r.bbox);
      draw_boxes(img, boxes);
      write_image(fs::path(a.out_dir) / (path.stem().string() + ".viz.png"), img);
    }
  });
  return report_batch_errors(images, errors);
}

struct RecognizeArgs {
  std::vector<std::string> inputs;
  std::string out_dir;
  std::string engine_cmd = OcrEngineConfig{}.engine_command;
  std::string mock_table;
  std::string lang = "tur";
  std::string psm = "block";
  int timeout_ms = 30000;
  int ocr_jobs = 1;
  int jobs = 1;
  bool no_detect = false;
  DetectorFlags det;
};

int cmd_recognize(const RecognizeArgs& a) {
  const auto cfg = a.det.config();
  OcrEngineConfig ocr;
  ocr.engine_command = a.engine_cmd;
  ocr.language = a.lang;
  ocr.page_segmentation = a.psm == "line"   ? PageSegmentation::single_line
                          : a.psm == "word" ? PageSegmentation::single_word
                                            : PageSegmentation::single_block;
  ocr.timeout_ms = a.timeout_ms;
  ocr.parallelism = a.ocr_jobs;

  std::unique_ptr<OcrEngine> engine;
  if (!a.mock_table.empty()) {
    engine = std::make_unique<MockEngine>(MockEngine::from_file(a.mock_table));
  } else {
    expand_command(ocr, "x");
    engine = std::make_unique<ProcessEngine>();
  }

  const auto images = collect_images(a.inputs);
  fs::create_directories(a.out_dir);
  std::mutex log_mutex;
  const auto errors = run_batch(images.size(), a.jobs, [&](std::size_t i) {
    const auto& path = images[i];
    const auto img = read_image(path);
    std::vector<TextRegion> regions;
    if (a.no_detect) {
      regions.push_back({img.bounds(), 0, 0.0});
    } else {
      regions = sort_reading_order(detect(img, cfg));
    }
    const auto results = recognize_regions(img, regions, *engine, ocr);
    for (const auto& r : results) {
      if (r.status != RecognitionStatus::ok) {
        std::lock_guard lock(log_mutex);
        std::cerr << "warning: " << path.string() << " region " << r.region.bbox << ": " << to_string(r.status)
                  << " (" << r.detail << ")\n";
      }
    }
    write_file_atomic(fs::path(a.out_dir) / (path.stem().string() + ".txt"), emit_text(results));
  });
  return report_batch_errors(images, errors);
}

struct EvalArgs {
  std::string ocr_dir;
  std::string gt;
  std::string format = "table";
  std::string out;
  std::optional<double> min_accuracy;
  bool no_normalize = false;
};

int cmd_eval(const EvalArgs& a) {
  const auto manifest = load_manifest(a.gt);
  if (manifest.entries.empty()) {
    std::cerr << "error: no annotated images in " << a.gt << "\n";
    return kExitProcessing;
  }
  std::vector<ImageEvalResult> results;
  std::vector<std::string> missing;
  const ScoreOptions opts{!a.no_normalize};
  for (const auto& e : manifest.entries) {
    const auto ann = load_annotation(e.annotation_file);
    auto ocr_file = fs::path(a.ocr_dir) / (ann.image_id + ".txt");
    if (!fs::exists(ocr_file)) ocr_file = fs::path(a.ocr_dir) / (e.image_file.stem().string() + ".txt");
    if (!fs::exists(ocr_file)) {
      missing.push_back(ocr_file.string());
      continue;
    }
    results.push_back(score_image(flatten_ground_truth(ann), read_file(ocr_file), opts, ann.image_id));
  }
  if (!missing.empty()) {
    std::cerr << "error: OCR outputs missing for " << missing.size() << " image(s):\n";
    for (const auto& m : missing) std::cerr << "  " << m << "\n";
    return kExitProcessing;
  }
  const auto report = aggregate(std::move(results));
  const auto json = report_json(report, opts.normalize_whitespace);
  if (a.format == "json") {
    std::cout << json.dump(2) << "\n";
  } else {
    std::cout << report_table(report);
    if (opts.normalize_whitespace) std::cout << "(whitespace normalized before scoring)\n";
  }
  if (!a.out.empty()) write_file_atomic(a.out, json.dump(2) + "\n");
  if (a.min_accuracy && report.overall_accuracy < *a.min_accuracy) {
    std::cerr << "accuracy " << report.overall_accuracy << " is below the floor " << *a.min_accuracy << "\n";
    return kExitBelowFloor;
  }
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::string> inputs;
  std::string manifest;
  int reps = 5;
  bool sweep = false;
  std::string json_out;
  DetectorFlags det;
};

int cmd_bench(const BenchArgs& a) {
  const auto base = a.det.config();
  std::vector<NamedImage> images;
  if (!a.manifest.empty()) {
    images = load_images(load_manifest(a.manifest));
  }
  for (const auto& p : collect_images(a.inputs)) images.push_back({p.filename().string(), read_image(p)});
  if (images.empty()) {
    std::cerr << "error: no images to benchmark\n";
    return kExitConfig;
  }

  std::vector<DetectorConfig> configs = a.sweep ? sweep_configs(base) : std::vector<DetectorConfig>{base};
  nlohmann::ordered_json dump = nlohmann::ordered_json::array();
  std::cout << timings_table_header();
  for (const auto& cfg : configs) {
    if (cfg.edge_method == EdgeMethod::canny && cfg.color_mode == ColorMode::rgb) {
      std::cout << std::left << std::setw(20) << config_label(cfg) << "unsupported\n";
      dump.push_back({{"config", config_label(cfg)}, {"unsupported", true}});
      continue;
    }
    const auto t = run_benchmark(images, cfg, a.reps);
    std::cout << timings_table_row(t);
    dump.push_back(timings_json(t));
  }
  if (!a.json_out.empty()) write_file_atomic(a.json_out, dump.dump(2) + "\n");
  return kExitOk;
}

struct ServeArgs {
  std::string root;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  DetectorFlags det;
};

int cmd_serve(const ServeArgs& a) {
  std::optional<fs::path> static_dir;
  if (!a.static_dir.empty()) static_dir = a.static_dir;
  AnnotationService service(a.root, a.det.config(), static_dir);
  httplib::Server server;
  service.register_routes(server);
  std::cout << "serving " << a.root << " on http://" << a.host << ":" << a.port << "\n" << std::flush;
  if (!server.listen(a.host, a.port)) {
    std::cerr << "error: cannot listen on " << a.host << ":" << a.port << "\n";
    return kExitProcessing;
  }
  return kExitOk;
}

struct ImportArgs {
  std::string tsv;
  std::string image;
  std::string id;
  std::string out;
};

int cmd_import_tsv(const ImportArgs& a) {
  const auto img = read_image(a.image);
  const auto id = a.id.empty() ? fs::path(a.image).stem().string() : a.id;
  const auto ann = import_tsv(read_file(a.tsv), id, img.width(), img.height());
  save_annotation(ann, a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene text detection, recognition and evaluation toolkit"};
  app.require_subcommand(1);

  DetectArgs detect_args;
  auto* detect_cmd = app.add_subcommand("detect", "Detect text regions and write detection records");
  detect_cmd->add_option("inputs", detect_args.inputs, "Image files or directories")->required();
  detect_cmd->add_option("-o,--out", detect_args.out_dir, "Output directory")->required();
  detect_cmd->add_flag("--viz", detect_args.viz, "Also write images with detected boxes drawn");
  detect_cmd->add_option("-j,--jobs", detect_args.jobs, "Images processed in parallel")->capture_default_str();
  detect_args.det.add_to(detect_cmd);

  RecognizeArgs rec_args;
  auto* rec_cmd = app.add_subcommand("recognize", "Detect, order and recognize text; write one .txt per image");
  rec_cmd->add_option("inputs", rec_args.inputs, "Image files or directories")->required();
  rec_cmd->add_option("-o,--out", rec_args.out_dir, "Output directory")->required();
  rec_cmd->add_option("--engine-cmd", rec_args.engine_cmd, "OCR command template ({image} {lang} {psm})")
      ->capture_default_str();
  rec_cmd->add_option("--mock-table", rec_args.mock_table, "Use the mock engine with this crop-hash table");
  rec_cmd->add_option("--lang", rec_args.lang, "OCR language")->capture_default_str();
  rec_cmd->add_option("--psm", rec_args.psm, "Page segmentation")
      ->check(CLI::IsMember({"block", "line", "word"}))
      ->capture_default_str();
  rec_cmd->add_option("--timeout-ms", rec_args.timeout_ms, "Per-region engine timeout")->capture_default_str();
  rec_cmd->add_option("--ocr-jobs", rec_args.ocr_jobs, "Regions recognized in parallel")->capture_default_str();
  rec_cmd->add_option("-j,--jobs", rec_args.jobs, "Images processed in parallel")->capture_default_str();
  rec_cmd->add_flag("--no-detect", rec_args.no_detect, "Recognize the whole image as one region");
  rec_args.det.add_to(rec_cmd);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score OCR outputs against ground truth");
  eval_cmd->add_option("--ocr-dir", eval_args.ocr_dir, "Directory of <imageId>.txt OCR outputs")->required();
  eval_cmd->add_option("--gt", eval_args.gt, "Dataset directory or manifest file")->required();
  eval_cmd->add_option("--format", eval_args.format, "Report format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  eval_cmd->add_option("--out", eval_args.out, "Also write the JSON report here");
  eval_cmd->add_option("--min-accuracy", eval_args.min_accuracy, "Fail (exit 3) below this overall accuracy")
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_flag("--no-normalize", eval_args.no_normalize, "Score raw text without whitespace normalization");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Measure per-stage detection times");
  bench_cmd->add_option("inputs", bench_args.inputs, "Image files or directories");
  bench_cmd->add_option("--manifest", bench_args.manifest, "Dataset directory or manifest file");
  bench_cmd->add_option("--reps", bench_args.reps, "Timed repetitions per image")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_flag("--sweep", bench_args.sweep, "Run every edge/color/scale combination");
  bench_cmd->add_option("--json", bench_args.json_out, "Write machine-readable timings here");
  bench_args.det.add_to(bench_cmd);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the annotation API (and UI assets)");
  serve_cmd->add_option("--root", serve_args.root, "Dataset directory")->required();
  serve_cmd->add_option("--host", serve_args.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve_args.port, "Port")->capture_default_str();
  serve_cmd->add_option("--static", serve_args.static_dir, "Directory with the built annotation UI");
  serve_args.det.add_to(serve_cmd);

  ImportArgs import_args;
  auto* import_cmd = app.add_subcommand("import-tsv", "Convert a TSV box list into an annotation file");
  import_cmd->add_option("tsv", import_args.tsv, "TSV file: x y w h<TAB>text per line")->required();
  import_cmd->add_option("--image", import_args.image, "Image the boxes belong to")->required();
  import_cmd->add_option("--id", import_args.id, "Image id (defaults to the image file stem)");
  import_cmd->add_option("-o,--out", import_args.out, "Annotation file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*detect_cmd) return cmd_detect(detect_args);
    if (*rec_cmd) return cmd_recognize(rec_args);
    if (*eval_cmd) return cmd_eval(eval_args);
    if (*bench_cmd) return cmd_bench(bench_args);
    if (*serve_cmd) return cmd_serve(serve_args);
    if (*import_cmd) return cmd_import_tsv(import_args);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitConfig;
}
