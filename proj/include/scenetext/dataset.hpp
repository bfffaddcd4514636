#pragma once

// Ground-truth annotations (one JSON document per image), dataset manifests
// and the flattened per-image ground-truth text used for OCR scoring.
//
// Canonical annotation form (see docs/formats.md):
//
//   {
//     "imageId": "img_0001",
//     "imageWidth": 1024,
//     "imageHeight": 576,
//     "boxes": [
//       {"x": 10, "y": 20, "w": 100, "h": 30, "text": "ÇIKIŞ"}
//     ]
//   }
//
// Boxes are sorted by (y, x, w, h, text); the file ends with a newline.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "scenetext/errors.hpp"
#include "scenetext/fileio.hpp"
#include "scenetext/geometry.hpp"
#include "scenetext/utf8.hpp"

namespace scenetext {

struct AnnotatedBox {
  Box box;
  std::string text;

  friend bool operator==(const AnnotatedBox&, const AnnotatedBox&) = default;
};

struct GroundTruthAnnotation {
  std::string image_id;
  int image_width = 0;
  int image_height = 0;
  std::vector<AnnotatedBox> boxes;

  friend bool operator==(const GroundTruthAnnotation&, const GroundTruthAnnotation&) = default;
};

struct ManifestEntry {
  std::filesystem::path image_file;
  std::filesystem::path annotation_file;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;

  std::size_t count() const noexcept { return entries.size(); }
};

// Throws ValidationError naming the first offending field or box.
inline void validate(const GroundTruthAnnotation& ann) {
  if (ann.image_id.empty()) throw ValidationError("imageId must not be empty");
  if (!utf8::is_valid(ann.image_id)) throw ValidationError("imageId is not valid UTF-8");
  if (ann.image_width < 1 || ann.image_height < 1) {
    throw ValidationError("image dimensions must be positive");
  }
  for (std::size_t i = 0; i < ann.boxes.size(); ++i) {
    const auto& b = ann.boxes[i];
    if (!within(b.box, ann.image_width, ann.image_height)) {
      std::ostringstream msg;
      msg << "box " << i << " " << b.box << " lies outside the " << ann.image_width << "x" << ann.image_height
          << " image";
      throw ValidationError(msg.str());
    }
    if (!utf8::is_valid(b.text)) throw ValidationError("box " + std::to_string(i) + " text is not valid UTF-8");
  }
}

inline GroundTruthAnnotation canonicalize(GroundTruthAnnotation ann) {
  std::sort(ann.boxes.begin(), ann.boxes.end(), [](const AnnotatedBox& a, const AnnotatedBox& b) {
    return std::tie(a.box.y, a.box.x, a.box.w, a.box.h, a.text) <
           std::tie(b.box.y, b.box.x, b.box.w, b.box.h, b.text);
  });
  return ann;
}

namespace detail {

inline std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

inline std::size_t line_of(std::string_view text, std::size_t byte_offset) {
  byte_offset = std::min(byte_offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte_offset, '\n'));
}

template <typename T>
T field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be an object", 0);
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing key \"" + key + "\"", 0);
  try {
    if constexpr (std::is_same_v<T, int>) {
      if (!it->is_number_integer()) throw ParseError(where + "." + key + " must be an integer", 0);
    }
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(where + "." + key + " has the wrong type", 0);
  }
}

}  // namespace detail

inline std::string serialize_annotation(const GroundTruthAnnotation& ann) {
  validate(ann);
  const auto canon = canonicalize(ann);
  std::string out = "{\n";
  out += "  \"imageId\": " + detail::json_string(canon.image_id) + ",\n";
  out += "  \"imageWidth\": " + std::to_string(canon.image_width) + ",\n";
  out += "  \"imageHeight\": " + std::to_string(canon.image_height) + ",\n";
  if (canon.boxes.empty()) {
    out += "  \"boxes\": []\n";
  } else {
    out += "  \"boxes\": [\n";
    for (std::size_t i = 0; i < canon.boxes.size(); ++i) {
      const auto& b = canon.boxes[i];
      out += "    {\"x\": " + std::to_string(b.box.x) + ", \"y\": " + std::to_string(b.box.y) +
             ", \"w\": " + std::to_string(b.box.w) + ", \"h\": " + std::to_string(b.box.h) +
             ", \"text\": " + detail::json_string(b.text) + "}";
      out += i + 1 < canon.boxes.size() ? ",\n" : "\n";
    }
    out += "  ]\n";
  }
  out += "}\n";
  return out;
}

// Converts an already-parsed JSON value; used by the HTTP API.
inline GroundTruthAnnotation annotation_from_json(const nlohmann::json& doc) {
  GroundTruthAnnotation ann;
  ann.image_id = detail::field<std::string>(doc, "imageId", "annotation");
  ann.image_width = detail::field<int>(doc, "imageWidth", "annotation");
  ann.image_height = detail::field<int>(doc, "imageHeight", "annotation");
  const auto boxes = doc.find("boxes");
  if (boxes == doc.end() || !boxes->is_array()) throw ParseError("annotation.boxes must be an array", 0);
  for (std::size_t i = 0; i < boxes->size(); ++i) {
    const auto& b = (*boxes)[i];
    const std::string where = "boxes[" + std::to_string(i) + "]";
    ann.boxes.push_back({Box{detail::field<int>(b, "x", where), detail::field<int>(b, "y", where),
                             detail::field<int>(b, "w", where), detail::field<int>(b, "h", where)},
                         detail::field<std::string>(b, "text", where)});
  }
  validate(ann);
  return ann;
}

inline nlohmann::json annotation_to_json(const GroundTruthAnnotation& ann) {
  return nlohmann::json::parse(serialize_annotation(ann));
}

inline GroundTruthAnnotation parse_annotation(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed annotation: ") + e.what(), detail::line_of(text, e.byte));
  }
  return annotation_from_json(doc);
}

inline GroundTruthAnnotation load_annotation(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return parse_annotation(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.message(), e.line());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline void save_annotation(const GroundTruthAnnotation& ann, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_annotation(ann));
}

// Tab-separated import: one box per line, "x y w h<TAB>transcription".
inline GroundTruthAnnotation import_tsv(std::string_view text, std::string image_id, int image_width,
                                        int image_height) {
  GroundTruthAnnotation ann{std::move(image_id), image_width, image_height, {}};
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected \"x y w h<TAB>text\"", line_no);
    std::istringstream coords{std::string(line.substr(0, tab))};
    Box b;
    std::string rest;
    if (!(coords >> b.x >> b.y >> b.w >> b.h) || (coords >> rest)) {
      throw ParseError("expected four integer coordinates", line_no);
    }
    std::string label(line.substr(tab + 1));
    if (!utf8::is_valid(label)) throw ParseError("transcription is not valid UTF-8", line_no);
    ann.boxes.push_back({b, std::move(label)});
  }
  validate(ann);
  return ann;
}

// Ground-truth transcriptions in reading order, one per line.
inline std::string flatten_ground_truth(const GroundTruthAnnotation& ann) {
  auto boxes = sort_by_reading_order(ann.boxes, &AnnotatedBox::box);
  std::string out;
  for (const auto& b : boxes) {
    out += b.text;
    out += '\n';
  }
  return out;
}

inline bool is_image_file(const std::filesystem::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// A directory is scanned for images paired with "<stem>.json" annotations; a
// file is read as {"entries": [{"image": ..., "annotation": ...}, ...]} with
// paths relative to the manifest's directory. Every listed file must exist.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  DatasetManifest m;
  std::vector<std::string> missing;
  if (fs::is_directory(path)) {
    m.root = path;
    std::vector<fs::path> images;
    for (const auto& e : fs::directory_iterator(path)) {
      if (e.is_regular_file() && is_image_file(e.path())) images.push_back(e.path());
    }
    std::sort(images.begin(), images.end());
    for (const auto& img : images) {
      auto ann = img;
      ann.replace_extension(".json");
      if (!fs::exists(ann)) {
        missing.push_back(ann.string());
        continue;
      }
      m.entries.push_back({img, ann});
    }
  } else {
    const auto text = read_file(path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path.string() + ": malformed manifest", detail::line_of(text, e.byte));
    }
    m.root = path.parent_path();
    const auto entries = doc.find("entries");
    if (!doc.is_object() || entries == doc.end() || !entries->is_array()) {
      throw ParseError(path.string() + ": manifest must contain an \"entries\" array", 0);
    }
    for (std::size_t i = 0; i < entries->size(); ++i) {
      const std::string where = "entries[" + std::to_string(i) + "]";
      const auto image = m.root / detail::field<std::string>((*entries)[i], "image", where);
      const auto ann = m.root / detail::field<std::string>((*entries)[i], "annotation", where);
      for (const auto& f : {image, ann}) {
        if (!fs::exists(f)) missing.push_back(f.string());
      }
      m.entries.push_back({image, ann});
    }
  }
  if (!missing.empty()) {
    std::string msg = "dataset files missing:";
    for (const auto& f : missing) msg += "\n  " + f;
    throw IoError(msg);
  }
  return m;
}

}  // namespace scenetext
