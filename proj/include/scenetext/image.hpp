#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scenetext/errors.hpp"
#include "scenetext/geometry.hpp"

namespace scenetext {

// 8-bit image with 1 (gray) or 3 (interleaved RGB) channels, row-major.
class RasterImage {
 public:
  RasterImage() = default;

  RasterImage(int width, int height, int channels, std::uint8_t fill = 0)
      : width_(width), height_(height), channels_(channels) {
    check_shape();
    pixels_.assign(size(), fill);
  }

  RasterImage(int width, int height, int channels, std::vector<std::uint8_t> pixels)
      : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
    check_shape();
    if (pixels_.size() != size()) {
      throw ShapeError("pixel buffer holds " + std::to_string(pixels_.size()) + " bytes, expected " +
                       std::to_string(size()));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return pixels_.empty(); }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_) *
           static_cast<std::size_t>(channels_);
  }

  std::uint8_t& at(int x, int y, int c = 0) noexcept { return pixels_[index(x, y, c)]; }
  std::uint8_t at(int x, int y, int c = 0) const noexcept { return pixels_[index(x, y, c)]; }

  std::uint8_t* row(int y) noexcept { return pixels_.data() + index(0, y, 0); }
  const std::uint8_t* row(int y) const noexcept { return pixels_.data() + index(0, y, 0); }

  std::span<std::uint8_t> pixels() noexcept { return pixels_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

  Box bounds() const noexcept { return {0, 0, width_, height_}; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  void check_shape() const {
    if (width_ < 1 || height_ < 1) {
      throw ShapeError("image dimensions must be positive, got " + std::to_string(width_) + "x" +
                       std::to_string(height_));
    }
    if (channels_ != 1 && channels_ != 3) {
      throw ShapeError("image must have 1 or 3 channels, got " + std::to_string(channels_));
    }
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Single-channel row-major plane. The tag keeps gradient images, binary masks
// and label maps from being mixed up.
template <typename T, typename Tag>
class Plane {
 public:
  using value_type = T;

  Plane() = default;

  Plane(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw ShapeError("plane dimensions must be positive, got " + std::to_string(width) + "x" +
                       std::to_string(height));
    }
    values_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& at(int x, int y) noexcept { return values_[index(x, y)]; }
  T at(int x, int y) const noexcept { return values_[index(x, y)]; }

  T* row(int y) noexcept { return values_.data() + index(0, y); }
  const T* row(int y) const noexcept { return values_.data() + index(0, y); }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> values_;
};

struct GradientTag;
struct MaskTag;
struct LabelTag;

// Non-negative gradient magnitudes saturated to [0, 255].
using GradientImage = Plane<std::uint8_t, GradientTag>;

// Foreground flags, 0 or 1.
using BinaryMask = Plane<std::uint8_t, MaskTag>;

// 0 = background, 1..K = component identifiers.
using LabelMap = Plane<std::int32_t, LabelTag>;

inline std::size_t count_foreground(const BinaryMask& mask) {
  std::size_t n = 0;
  for (auto v : mask.values()) n += v != 0;
  return n;
}

}  // namespace scenetext
