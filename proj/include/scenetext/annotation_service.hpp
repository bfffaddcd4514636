#pragma once

// JSON-over-HTTP backend for the browser annotation tool.
//
//   GET  /api/images                  {"images": [{"id", "file", "hasAnnotation", "version"}]}
//   GET  /api/images/{id}/image       raw image bytes
//   GET  /api/images/{id}/annotation  {"version": n, "annotation": {...}}
//   PUT  /api/images/{id}/annotation  body: annotation; 200 {"version": n},
//                                     400 malformed, 422 invalid (file untouched)
//   GET  /api/images/{id}/detections  detection record for overlay assistance
//
// Images live directly in the dataset root; the annotation for "foo.jpg" is
// "foo.json". Writes to one image are serialized; concurrent writers are
// last-writer-wins and each successful store bumps the image's version.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "scenetext/dataset.hpp"
#include "scenetext/detector.hpp"
#include "scenetext/errors.hpp"
#include "scenetext/fileio.hpp"
#include "scenetext/io.hpp"
#include "scenetext/records.hpp"

namespace scenetext {

class AnnotationService {
 public:
  struct ImageInfo {
    std::string id;
    std::filesystem::path file;
  };

  explicit AnnotationService(std::filesystem::path root, DetectorConfig detector = {},
                             std::optional<std::filesystem::path> static_dir = std::nullopt)
      : root_(std::move(root)), detector_(detector), static_dir_(std::move(static_dir)) {
    if (!std::filesystem::is_directory(root_)) throw IoError("dataset root is not a directory: " + root_.string());
    validate(detector_);
  }

  std::vector<ImageInfo> list_images() const {
    std::vector<ImageInfo> out;
    for (const auto& e : std::filesystem::directory_iterator(root_)) {
      if (e.is_regular_file() && is_image_file(e.path())) out.push_back({e.path().stem().string(), e.path()});
    }
    std::sort(out.begin(), out.end(), [](const ImageInfo& a, const ImageInfo& b) { return a.id < b.id; });
    return out;
  }

  std::optional<ImageInfo> find_image(const std::string& id) const {
    if (id.empty() || id.find('/') != std::string::npos || id.find("..") != std::string::npos) return std::nullopt;
    for (auto& info : list_images()) {
      if (info.id == id) return info;
    }
    return std::nullopt;
  }

  std::filesystem::path annotation_path(const ImageInfo& info) const {
    auto p = info.file;
    p.replace_extension(".json");
    return p;
  }

  std::uint64_t version(const std::string& id) const {
    std::lock_guard lock(state_mutex_);
    const auto it = versions_.find(id);
    return it == versions_.end() ? 0 : it->second;
  }

  void register_routes(httplib::Server& server) {
    server.Get("/api/images", [this](const httplib::Request&, httplib::Response& res) { handle_list(res); });
    server.Get(R"(/api/images/([^/]+)/image)",
               [this](const httplib::Request& req, httplib::Response& res) { handle_image(req.matches[1], res); });
    server.Get(R"(/api/images/([^/]+)/annotation)", [this](const httplib::Request& req, httplib::Response& res) {
      handle_get_annotation(req.matches[1], res);
    });
    server.Put(R"(/api/images/([^/]+)/annotation)", [this](const httplib::Request& req, httplib::Response& res) {
      handle_put_annotation(req.matches[1], req.body, res);
    });
    server.Get(R"(/api/images/([^/]+)/detections)", [this](const httplib::Request& req, httplib::Response& res) {
      handle_detections(req.matches[1], res);
    });
    if (static_dir_) {
      server.set_mount_point("/", static_dir_->string());
    } else {
      server.Get("/", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(
            "<!doctype html><title>scenetext annotate</title><p>Annotation API is running. Start the server "
            "with --static pointing at the built annotation UI to serve it here.</p>",
            "text/html; charset=utf-8");
      });
    }
  }

 private:
  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
  }

  static void send_error(httplib::Response& res, int status, const std::string& error, const std::string& detail) {
    send_json(res, status, {{"error", error}, {"detail", detail}});
  }

  std::mutex& write_mutex(const std::string& id) {
    std::lock_guard lock(state_mutex_);
    auto& m = write_mutexes_[id];
    if (!m) m = std::make_unique<std::mutex>();
    return *m;
  }

  void handle_list(httplib::Response& res) const {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& info : list_images()) {
      list.push_back({{"id", info.id},
                      {"file", info.file.filename().string()},
                      {"hasAnnotation", std::filesystem::exists(annotation_path(info))},
                      {"version", version(info.id)}});
    }
    send_json(res, 200, {{"images", list}});
  }

  void handle_image(const std::string& id, httplib::Response& res) const {
    const auto info = find_image(id);
    if (!info) return send_error(res, 404, "not_found", "no image with id " + id);
    auto ext = info->file.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    res.status = 200;
    res.set_content(read_file(info->file), ext == ".png" ? "image/png" : "image/jpeg");
  }

  GroundTruthAnnotation current_annotation(const ImageInfo& info) const {
    const auto path = annotation_path(info);
    if (std::filesystem::exists(path)) return load_annotation(path);
    const auto img = read_image(info.file);
    return {info.id, img.width(), img.height(), {}};
  }

  void handle_get_annotation(const std::string& id, httplib::Response& res) const {
    const auto info = find_image(id);
    if (!info) return send_error(res, 404, "not_found", "no image with id " + id);
    try {
      const auto ann = current_annotation(*info);
      send_json(res, 200, {{"version", version(id)}, {"annotation", annotation_to_json(ann)}});
    } catch (const Error& e) {
      send_error(res, 500, "unreadable_annotation", e.what());
    }
  }

  void handle_put_annotation(const std::string& id, const std::string& body, httplib::Response& res) {
    const auto info = find_image(id);
    if (!info) return send_error(res, 404, "not_found", "no image with id " + id);
    GroundTruthAnnotation ann;
    try {
      ann = annotation_from_json(nlohmann::json::parse(body));
    } catch (const nlohmann::json::parse_error& e) {
      return send_error(res, 400, "malformed_json", e.what());
    } catch (const ParseError& e) {
      return send_error(res, 400, "malformed_annotation", e.what());
    } catch (const ValidationError& e) {
      return send_error(res, 422, "invalid_annotation", e.what());
    }
    if (ann.image_id != id) {
      return send_error(res, 422, "invalid_annotation", "imageId \"" + ann.image_id + "\" does not match " + id);
    }
    try {
      const auto img = read_image(info->file);
      if (ann.image_width != img.width() || ann.image_height != img.height()) {
        return send_error(res, 422, "invalid_annotation",
                          "annotation dimensions " + std::to_string(ann.image_width) + "x" +
                              std::to_string(ann.image_height) + " do not match the image (" +
                              std::to_string(img.width()) + "x" + std::to_string(img.height()) + ")");
      }
    } catch (const Error& e) {
      return send_error(res, 500, "unreadable_image", e.what());
    }

    std::uint64_t new_version;
    {
      std::lock_guard lock(write_mutex(id));
      try {
        save_annotation(ann, annotation_path(*info));
      } catch (const Error& e) {
        return send_error(res, 500, "write_failed", e.what());
      }
      std::lock_guard state(state_mutex_);
      new_version = ++versions_[id];
    }
    send_json(res, 200, {{"version", new_version}});
  }

  void handle_detections(const std::string& id, httplib::Response& res) const {
    const auto info = find_image(id);
    if (!info) return send_error(res, 404, "not_found", "no image with id " + id);
    try {
      const auto img = read_image(info->file);
      const DetectionRecord rec{info->file.filename().string(), img.width(), img.height(), detect(img, detector_)};
      res.status = 200;
      res.set_content(serialize_detections(rec), "application/json; charset=utf-8");
    } catch (const Error& e) {
      send_error(res, 500, "detection_failed", e.what());
    }
  }

  std::filesystem::path root_;
  DetectorConfig detector_;
  std::optional<std::filesystem::path> static_dir_;
  mutable std::mutex state_mutex_;
  std::map<std::string, std::uint64_t> versions_;
  std::map<std::string, std::unique_ptr<std::mutex>> write_mutexes_;
};

}  // namespace scenetext
