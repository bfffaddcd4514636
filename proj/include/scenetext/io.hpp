#pragma once

// PNG/JPEG decode and encode at the library boundary (OpenCV codecs), plus
// box drawing for visualizations.

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "scenetext/errors.hpp"
#include "scenetext/geometry.hpp"
#include "scenetext/image.hpp"

namespace scenetext {

namespace detail {

inline RasterImage from_bgr(const cv::Mat& mat) {
  if (mat.empty()) throw IoError("image could not be decoded");
  if (mat.depth() != CV_8U) throw IoError("only 8-bit images are supported");
  if (mat.channels() == 1) {
    RasterImage out(mat.cols, mat.rows, 1);
    for (int y = 0; y < mat.rows; ++y) std::copy_n(mat.ptr<std::uint8_t>(y), mat.cols, out.row(y));
    return out;
  }
  if (mat.channels() != 3) throw IoError("unsupported channel count " + std::to_string(mat.channels()));
  RasterImage out(mat.cols, mat.rows, 3);
  for (int y = 0; y < mat.rows; ++y) {
    const std::uint8_t* src = mat.ptr<std::uint8_t>(y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < mat.cols; ++x) {
      dst[3 * x] = src[3 * x + 2];
      dst[3 * x + 1] = src[3 * x + 1];
      dst[3 * x + 2] = src[3 * x];
    }
  }
  return out;
}

inline cv::Mat to_bgr(const RasterImage& img) {
  if (img.channels() == 1) {
    cv::Mat mat(img.height(), img.width(), CV_8UC1);
    for (int y = 0; y < img.height(); ++y) std::copy_n(img.row(y), img.width(), mat.ptr<std::uint8_t>(y));
    return mat;
  }
  cv::Mat mat(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    const std::uint8_t* src = img.row(y);
    std::uint8_t* dst = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      dst[3 * x] = src[3 * x + 2];
      dst[3 * x + 1] = src[3 * x + 1];
      dst[3 * x + 2] = src[3 * x];
    }
  }
  return mat;
}

}  // namespace detail

// Decodes to 3-channel RGB regardless of the stored layout.
inline RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw IoError("empty image buffer");
  const cv::Mat buf(1, static_cast<int>(bytes.size()), CV_8UC1, const_cast<std::uint8_t*>(bytes.data()));
  return detail::from_bgr(cv::imdecode(buf, cv::IMREAD_COLOR));
}

inline RasterImage read_image(const std::filesystem::path& path) {
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (mat.empty()) throw IoError("cannot read image " + path.string());
  return detail::from_bgr(mat);
}

// `ext` selects the codec, e.g. ".png" or ".jpg".
inline std::vector<std::uint8_t> encode_image(const RasterImage& img, const std::string& ext = ".png") {
  std::vector<std::uint8_t> out;
  if (!cv::imencode(ext, detail::to_bgr(img), out)) throw IoError("cannot encode image as " + ext);
  return out;
}

inline void write_image(const std::filesystem::path& path, const RasterImage& img) {
  if (!cv::imwrite(path.string(), detail::to_bgr(img))) throw IoError("cannot write image " + path.string());
}

// Draws rectangle outlines (inside each box) in place.
inline void draw_boxes(RasterImage& img, std::span<const Box> boxes,
                       std::array<std::uint8_t, 3> color = {0, 255, 0}, int thickness = 2) {
  auto put = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= img.width() || y >= img.height()) return;
    if (img.channels() == 1) {
      img.at(x, y) = color[1];
    } else {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = color[c];
    }
  };
  for (const auto& b0 : boxes) {
    const Box b = clip(b0, img.width(), img.height());
    if (b.empty()) continue;
    for (int t = 0; t < thickness; ++t) {
      for (int x = b.x; x < b.right(); ++x) {
        put(x, b.y + t);
        put(x, b.bottom() - 1 - t);
      }
      for (int y = b.y; y < b.bottom(); ++y) {
        put(b.x + t, y);
        put(b.right() - 1 - t, y);
      }
    }
  }
}

}  // namespace scenetext
