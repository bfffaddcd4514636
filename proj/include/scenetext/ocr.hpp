#pragma once

// Adapter to an external OCR engine. Each detected region is cropped from the
// original image (no rotation correction), written to a temporary PNG and
// handed to an engine process; stdout is taken as the recognized UTF-8 text.
// MockEngine answers from a table keyed by crop content hash.

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "scenetext/detector.hpp"
#include "scenetext/errors.hpp"
#include "scenetext/fileio.hpp"
#include "scenetext/image.hpp"
#include "scenetext/imgproc.hpp"
#include "scenetext/io.hpp"
#include "scenetext/utf8.hpp"

extern char** environ;

namespace scenetext {

enum class PageSegmentation { single_block, single_line, single_word };

// Tesseract page segmentation mode numbers.
constexpr int psm_code(PageSegmentation p) noexcept {
  switch (p) {
    case PageSegmentation::single_block: return 6;
    case PageSegmentation::single_line: return 7;
    case PageSegmentation::single_word: return 8;
  }
  return 6;
}

struct OcrEngineConfig {
  // Whitespace-separated argv template; {image}, {lang} and {psm} are substituted.
  std::string engine_command = "tesseract {image} stdout -l {lang} --psm {psm}";
  std::string language = "tur";
  PageSegmentation page_segmentation = PageSegmentation::single_block;
  int timeout_ms = 30000;
  int parallelism = 1;
  // Optional transform applied to each crop before recognition.
  std::function<RasterImage(const RasterImage&)> preprocess;
};

enum class RecognitionStatus { ok, timeout, failed };

inline std::string_view to_string(RecognitionStatus s) noexcept {
  switch (s) {
    case RecognitionStatus::ok: return "ok";
    case RecognitionStatus::timeout: return "timeout";
    case RecognitionStatus::failed: return "failed";
  }
  return "?";
}

struct EngineOutput {
  std::string text;
  RecognitionStatus status = RecognitionStatus::ok;
  std::string detail;
};

struct RecognizedRegion {
  TextRegion region;
  std::string text;
  double engine_ms = 0.0;
  RecognitionStatus status = RecognitionStatus::ok;
  std::string detail;
};

class OcrEngine {
 public:
  virtual ~OcrEngine() = default;
  virtual EngineOutput recognize(const RasterImage& crop, const OcrEngineConfig& cfg) const = 0;
};

// Drops trailing whitespace (engines end pages with "\n\f") and replaces
// malformed UTF-8.
inline std::string clean_engine_text(std::string_view raw) {
  const auto end = raw.find_last_not_of(" \t\r\n\f\v");
  return utf8::sanitize(end == std::string_view::npos ? std::string_view{} : raw.substr(0, end + 1));
}

inline std::vector<std::string> expand_command(const OcrEngineConfig& cfg, const std::string& image_path) {
  std::vector<std::string> argv;
  std::istringstream in(cfg.engine_command);
  std::string token;
  auto replace_all = [](std::string& s, std::string_view from, const std::string& to) {
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
      s.replace(pos, from.size(), to);
    }
  };
  while (in >> token) {
    replace_all(token, "{image}", image_path);
    replace_all(token, "{lang}", cfg.language);
    replace_all(token, "{psm}", std::to_string(psm_code(cfg.page_segmentation)));
    argv.push_back(std::move(token));
  }
  if (argv.empty()) throw ConfigError("OCR engine command is empty");
  return argv;
}

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
};

// Runs argv with stdin and stderr on /dev/null and captures stdout. Throws
// EngineError when the program cannot be started.
inline ProcessResult run_process(const std::vector<std::string>& argv, int timeout_ms) {
  int fds[2];
  if (::pipe2(fds, O_CLOEXEC) != 0) throw EngineError("pipe failed: " + std::string(std::strerror(errno)));

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    throw EngineError("cannot launch OCR engine '" + argv[0] + "': " + std::strerror(rc));
  }

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  char buf[4096];
  while (true) {
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()).count();
    if (left <= 0) {
      result.timed_out = true;
      break;
    }
    pollfd pfd{fds[0], POLLIN, 0};
    const int pr = ::poll(&pfd, 1, static_cast<int>(left));
    if (pr < 0 && errno == EINTR) continue;
    if (pr == 0) {
      result.timed_out = true;
      break;
    }
    const auto n = ::read(fds[0], buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    result.out.append(buf, static_cast<std::size_t>(n));
  }
  ::close(fds[0]);
  if (result.timed_out) ::kill(pid, SIGKILL);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!result.timed_out) result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class ProcessEngine : public OcrEngine {
 public:
  EngineOutput recognize(const RasterImage& crop, const OcrEngineConfig& cfg) const override {
    static std::atomic<unsigned> counter{0};
    const auto path = std::filesystem::temp_directory_path() /
                      ("scenetext-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".png");
    write_image(path, crop);
    struct Cleanup {
      std::filesystem::path p;
      ~Cleanup() {
        std::error_code ec;
        std::filesystem::remove(p, ec);
      }
    } cleanup{path};

    const auto argv = expand_command(cfg, path.string());
    const auto res = run_process(argv, cfg.timeout_ms);
    if (res.timed_out) {
      return {"", RecognitionStatus::timeout, "no result within " + std::to_string(cfg.timeout_ms) + " ms"};
    }
    if (res.exit_code != 0) {
      return {"", RecognitionStatus::failed, argv[0] + " exited with status " + std::to_string(res.exit_code)};
    }
    return {clean_engine_text(res.out), RecognitionStatus::ok, {}};
  }
};

// FNV-1a 64 over dimensions, channel count and pixels; 16 lowercase hex digits.
inline std::string crop_hash(const RasterImage& img) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (int v : {img.width(), img.height(), img.channels()}) {
    for (int k = 0; k < 4; ++k) mix(static_cast<std::uint8_t>(static_cast<std::uint32_t>(v) >> (8 * k)));
  }
  for (auto b : img.pixels()) mix(b);
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

// Lookup table engine: {"<crop hash>": "text", ...}. Unknown crops yield
// `fallback`.
class MockEngine : public OcrEngine {
 public:
  explicit MockEngine(std::map<std::string, std::string> table = {}, std::string fallback = {})
      : table_(std::move(table)), fallback_(std::move(fallback)) {}

  static MockEngine from_file(const std::filesystem::path& path) {
    const auto text = read_file(path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ": malformed mock table", 0);
    }
    if (!doc.is_object()) throw ParseError(path.string() + ": mock table must be a JSON object", 0);
    std::map<std::string, std::string> table;
    for (const auto& [k, v] : doc.items()) {
      if (!v.is_string()) throw ParseError(path.string() + ": entry " + k + " is not a string", 0);
      table.emplace(k, v.get<std::string>());
    }
    return MockEngine(std::move(table));
  }

  EngineOutput recognize(const RasterImage& crop, const OcrEngineConfig&) const override {
    const auto it = table_.find(crop_hash(crop));
    return {it == table_.end() ? fallback_ : it->second, RecognitionStatus::ok, {}};
  }

 private:
  std::map<std::string, std::string> table_;
  std::string fallback_;
};

// One result per region, in input order. Launch failures propagate as
// EngineError; per-region timeouts and engine errors are recorded in the
// result's status with empty text.
inline std::vector<RecognizedRegion> recognize_regions(const RasterImage& img, const std::vector<TextRegion>& regions,
                                                       const OcrEngine& engine, const OcrEngineConfig& cfg) {
  std::vector<RecognizedRegion> out(regions.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= regions.size()) return;
      try {
        out[i].region = regions[i];
        RasterImage piece = crop(img, regions[i].bbox);
        if (cfg.preprocess) piece = cfg.preprocess(piece);
        const auto start = std::chrono::steady_clock::now();
        auto res = engine.recognize(piece, cfg);
        out[i].engine_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        out[i].text = std::move(res.text);
        out[i].status = res.status;
        out[i].detail = std::move(res.detail);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = regions.size();
        return;
      }
    }
  };

  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.parallelism, 1)),
                                                    regions.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

// One line per region. Internal newlines from the engine are kept as-is.
inline std::string emit_text(const std::vector<RecognizedRegion>& results) {
  std::string out;
  for (const auto& r : results) {
    out += r.text;
    out += '\n';
  }
  return out;
}

}  // namespace scenetext
