#pragma once

// Per-image detection record:
//
//   {
//     "image": "street_01.jpg",
//     "width": 1024,
//     "height": 576,
//     "regions": [
//       {"x": 94, "y": 48, "w": 208, "h": 44, "scaleIndex": 0}
//     ]
//   }

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scenetext/dataset.hpp"
#include "scenetext/detector.hpp"
#include "scenetext/errors.hpp"

namespace scenetext {

struct DetectionRecord {
  std::string image;
  int width = 0;
  int height = 0;
  std::vector<TextRegion> regions;
};

inline std::string serialize_detections(const DetectionRecord& rec) {
  std::string out = "{\n";
  out += "  \"image\": " + detail::json_string(rec.image) + ",\n";
  out += "  \"width\": " + std::to_string(rec.width) + ",\n";
  out += "  \"height\": " + std::to_string(rec.height) + ",\n";
  if (rec.regions.empty()) {
    out += "  \"regions\": []\n";
  } else {
    out += "  \"regions\": [\n";
    for (std::size_t i = 0; i < rec.regions.size(); ++i) {
      const auto& r = rec.regions[i];
      out += "    {\"x\": " + std::to_string(r.bbox.x) + ", \"y\": " + std::to_string(r.bbox.y) +
             ", \"w\": " + std::to_string(r.bbox.w) + ", \"h\": " + std::to_string(r.bbox.h) +
             ", \"scaleIndex\": " + std::to_string(r.scale_index) + "}";
      out += i + 1 < rec.regions.size() ? ",\n" : "\n";
    }
    out += "  ]\n";
  }
  out += "}\n";
  return out;
}

inline DetectionRecord parse_detections(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed detection record", detail::line_of(text, e.byte));
  }
  DetectionRecord rec;
  rec.image = detail::field<std::string>(doc, "image", "record");
  rec.width = detail::field<int>(doc, "width", "record");
  rec.height = detail::field<int>(doc, "height", "record");
  const auto regions = doc.find("regions");
  if (regions == doc.end() || !regions->is_array()) throw ParseError("record.regions must be an array", 0);
  for (std::size_t i = 0; i < regions->size(); ++i) {
    const auto& r = (*regions)[i];
    const std::string where = "regions[" + std::to_string(i) + "]";
    rec.regions.push_back({Box{detail::field<int>(r, "x", where), detail::field<int>(r, "y", where),
                               detail::field<int>(r, "w", where), detail::field<int>(r, "h", where)},
                           detail::field<int>(r, "scaleIndex", where), 0.0});
  }
  return rec;
}

}  // namespace scenetext
