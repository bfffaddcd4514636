#pragma once

// Low-level image primitives used by the text detector: grayscale conversion,
// horizontal gradient operators, Otsu thresholding, Canny edges, binary
// morphology, connected components and bilinear resampling.
//
// Every kernel uses edge replication at the image border.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "scenetext/errors.hpp"
#include "scenetext/geometry.hpp"
#include "scenetext/image.hpp"

namespace scenetext {

enum class GradientMethod { sobel, morph };

struct ComponentStats {
  std::int32_t label = 0;
  std::int64_t area = 0;
  Box bbox;

  double aspect_ratio() const noexcept { return static_cast<double>(bbox.w) / bbox.h; }
  double extent() const noexcept { return static_cast<double>(area) / static_cast<double>(bbox.area()); }

  friend bool operator==(const ComponentStats&, const ComponentStats&) = default;
};

struct Components {
  LabelMap labels;
  std::vector<ComponentStats> stats;  // stats[k - 1] describes label k

  std::int32_t count() const noexcept { return static_cast<std::int32_t>(stats.size()); }
};

namespace detail {

inline void require_min_size(int width, int height, int min_w, int min_h, const char* op) {
  if (width < min_w || height < min_h) {
    throw ShapeError(std::string(op) + " needs at least " + std::to_string(min_w) + "x" +
                     std::to_string(min_h) + " pixels, got " + std::to_string(width) + "x" +
                     std::to_string(height));
  }
}

inline std::uint8_t saturate(int v) noexcept {
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

// One channel of an interleaved image.
struct ChannelView {
  const std::uint8_t* data;
  int width;
  int height;
  int stride;  // bytes between horizontally adjacent samples
  int channel;

  std::uint8_t at(int x, int y) const noexcept {
    return data[(static_cast<std::size_t>(y) * width + x) * stride + channel];
  }
  const std::uint8_t* row(int y) const noexcept {
    return data + static_cast<std::size_t>(y) * width * stride + channel;
  }
};

inline ChannelView channel_view(const RasterImage& img, int c) {
  return {img.pixels().data(), img.width(), img.height(), img.channels(), c};
}

// Column indices with edge replication: left[x] = max(x - 1, 0), right[x] = min(x + 1, w - 1).
inline void neighbour_columns(int width, std::vector<int>& left, std::vector<int>& right) {
  left.resize(width);
  right.resize(width);
  for (int x = 0; x < width; ++x) {
    left[x] = std::max(x - 1, 0);
    right[x] = std::min(x + 1, width - 1);
  }
}

// |Sobel Gx| of one channel, written to `out` (or max-accumulated into it).
inline void sobel_gx_channel(const ChannelView& src, GradientImage& out, bool accumulate) {
  const int w = src.width;
  const int h = src.height;
  const int s = src.stride;
  std::vector<int> left, right;
  neighbour_columns(w, left, right);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* up = src.row(std::max(y - 1, 0));
    const std::uint8_t* mid = src.row(y);
    const std::uint8_t* down = src.row(std::min(y + 1, h - 1));
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const int l = left[x] * s;
      const int r = right[x] * s;
      const int g = (up[r] - up[l]) + 2 * (mid[r] - mid[l]) + (down[r] - down[l]);
      const std::uint8_t v = saturate(std::abs(g));
      dst[x] = accumulate ? std::max(dst[x], v) : v;
    }
  }
}

// Horizontal 3x1 dilation minus erosion of one channel.
inline void morph_gx_channel(const ChannelView& src, GradientImage& out, bool accumulate) {
  const int w = src.width;
  const int s = src.stride;
  std::vector<int> left, right;
  neighbour_columns(w, left, right);
  for (int y = 0; y < src.height; ++y) {
    const std::uint8_t* p = src.row(y);
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) {
      const std::uint8_t a = p[left[x] * s];
      const std::uint8_t b = p[x * s];
      const std::uint8_t c = p[right[x] * s];
      const std::uint8_t v =
          static_cast<std::uint8_t>(std::max({a, b, c}) - std::min({a, b, c}));
      dst[x] = accumulate ? std::max(dst[x], v) : v;
    }
  }
}

// Signed 3x3 Sobel derivatives with edge replication.
inline void sobel_xy(const RasterImage& img, std::vector<int>& dx, std::vector<int>& dy) {
  const int w = img.width();
  const int h = img.height();
  dx.assign(static_cast<std::size_t>(w) * h, 0);
  dy.assign(static_cast<std::size_t>(w) * h, 0);
  std::vector<int> left, right;
  neighbour_columns(w, left, right);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* up = img.row(std::max(y - 1, 0));
    const std::uint8_t* mid = img.row(y);
    const std::uint8_t* down = img.row(std::min(y + 1, h - 1));
    for (int x = 0; x < w; ++x) {
      const int l = left[x];
      const int r = right[x];
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      dx[i] = (up[r] - up[l]) + 2 * (mid[r] - mid[l]) + (down[r] - down[l]);
      dy[i] = (down[l] + 2 * down[x] + down[r]) - (up[l] + 2 * up[x] + up[r]);
    }
  }
}

// a * b as a 192-bit value (most significant limb first).
inline std::array<std::uint64_t, 3> mul_u128_u64(unsigned __int128 a, std::uint64_t b) noexcept {
  const auto lo = static_cast<unsigned __int128>(static_cast<std::uint64_t>(a)) * b;
  const auto hi = static_cast<unsigned __int128>(static_cast<std::uint64_t>(a >> 64)) * b;
  const unsigned __int128 mid = (lo >> 64) + static_cast<std::uint64_t>(hi);
  return {static_cast<std::uint64_t>(hi >> 64) + static_cast<std::uint64_t>(mid >> 64),
          static_cast<std::uint64_t>(mid), static_cast<std::uint64_t>(lo)};
}

// Between-class variance scaled by N^2, kept as the exact fraction num / den.
struct VarianceRatio {
  unsigned __int128 num = 0;
  std::uint64_t den = 1;

  friend bool operator<(const VarianceRatio& a, const VarianceRatio& b) noexcept {
    return mul_u128_u64(a.num, b.den) < mul_u128_u64(b.num, a.den);
  }
};

// Binary rank filter along rows. Dilation window for column x is
// [x - (k - 1 - a), x + a], erosion window [x - a, x + (k - 1 - a)], a = k / 2,
// clipped to the image; dilation and erosion are therefore adjoint for any k.
inline void rank_rows(const BinaryMask& src, BinaryMask& dst, int k, bool dilate) {
  const int w = src.width();
  const int a = k / 2;
  const int before = dilate ? k - 1 - a : a;
  const int after = dilate ? a : k - 1 - a;
  std::vector<int> prefix(static_cast<std::size_t>(w) + 1);
  for (int y = 0; y < src.height(); ++y) {
    const std::uint8_t* s = src.row(y);
    std::uint8_t* d = dst.row(y);
    prefix[0] = 0;
    for (int x = 0; x < w; ++x) prefix[x + 1] = prefix[x] + (s[x] != 0);
    for (int x = 0; x < w; ++x) {
      const int l = std::max(x - before, 0);
      const int r = std::min(x + after, w - 1);
      const int n = prefix[r + 1] - prefix[l];
      d[x] = dilate ? n > 0 : n == r - l + 1;
    }
  }
}

inline void rank_cols(const BinaryMask& src, BinaryMask& dst, int k, bool dilate) {
  const int w = src.width();
  const int h = src.height();
  const int a = k / 2;
  const int before = dilate ? k - 1 - a : a;
  const int after = dilate ? a : k - 1 - a;
  std::vector<int> counts(w, 0);
  // Sliding window of rows [lo, hi].
  int lo = 0;
  int hi = -1;
  for (int y = 0; y < h; ++y) {
    const int want_lo = std::max(y - before, 0);
    const int want_hi = std::min(y + after, h - 1);
    while (hi < want_hi) {
      ++hi;
      const std::uint8_t* s = src.row(hi);
      for (int x = 0; x < w; ++x) counts[x] += s[x] != 0;
    }
    while (lo < want_lo) {
      const std::uint8_t* s = src.row(lo);
      for (int x = 0; x < w; ++x) counts[x] -= s[x] != 0;
      ++lo;
    }
    const int full = hi - lo + 1;
    std::uint8_t* d = dst.row(y);
    for (int x = 0; x < w; ++x) d[x] = dilate ? counts[x] > 0 : counts[x] == full;
  }
}

}  // namespace detail

// Luma with the 0.299 / 0.587 / 0.114 weights, rounded half up.
inline RasterImage to_grayscale(const RasterImage& img) {
  if (img.channels() != 3) {
    throw ShapeError("to_grayscale expects a 3-channel image, got " + std::to_string(img.channels()));
  }
  RasterImage out(img.width(), img.height(), 1);
  const auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0, n = dst.size(); i < n; ++i) {
    const std::uint32_t r = src[3 * i];
    const std::uint32_t g = src[3 * i + 1];
    const std::uint32_t b = src[3 * i + 2];
    dst[i] = static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
  }
  return out;
}

// |Sobel Gx| (aperture 3) of a grayscale image, saturated to 255.
inline GradientImage sobel_gx(const RasterImage& img) {
  if (img.channels() != 1) throw ShapeError("sobel_gx expects a 1-channel image");
  detail::require_min_size(img.width(), img.height(), 3, 3, "sobel_gx");
  GradientImage out(img.width(), img.height());
  detail::sobel_gx_channel(detail::channel_view(img, 0), out, false);
  return out;
}

// Dilation minus erosion with a 3-wide, 1-tall structuring element.
inline GradientImage morph_gradient_gx(const RasterImage& img) {
  if (img.channels() != 1) throw ShapeError("morph_gradient_gx expects a 1-channel image");
  detail::require_min_size(img.width(), img.height(), 3, 1, "morph_gradient_gx");
  GradientImage out(img.width(), img.height());
  detail::morph_gx_channel(detail::channel_view(img, 0), out, false);
  return out;
}

// Per-pixel maximum of the R, G and B horizontal gradients.
inline GradientImage max_channel_gx(const RasterImage& img, GradientMethod method) {
  if (img.channels() != 3) throw ShapeError("max_channel_gx expects a 3-channel image");
  if (method == GradientMethod::sobel) {
    detail::require_min_size(img.width(), img.height(), 3, 3, "max_channel_gx");
  } else {
    detail::require_min_size(img.width(), img.height(), 3, 1, "max_channel_gx");
  }
  GradientImage out(img.width(), img.height());
  for (int c = 0; c < 3; ++c) {
    const auto view = detail::channel_view(img, c);
    if (method == GradientMethod::sobel) {
      detail::sobel_gx_channel(view, out, c > 0);
    } else {
      detail::morph_gx_channel(view, out, c > 0);
    }
  }
  return out;
}

// Otsu level: the t maximizing the between-class variance of {v <= t} vs {v > t}.
// Variances are compared exactly; ties go to the smallest t. A constant image
// yields its own value, so thresholding leaves it all background.
inline std::uint8_t otsu_level(const GradientImage& grad) {
  std::array<std::uint64_t, 256> hist{};
  for (auto v : grad.values()) ++hist[v];

  const std::uint64_t total = grad.size();
  if (total > (std::uint64_t{1} << 27)) throw ShapeError("otsu_level: image too large");
  std::uint64_t sum = 0;
  for (int v = 0; v < 256; ++v) sum += hist[v] * static_cast<std::uint64_t>(v);

  int best_t = -1;
  detail::VarianceRatio best;
  std::uint64_t n0 = 0;
  std::uint64_t s0 = 0;
  for (int t = 0; t < 256; ++t) {
    n0 += hist[t];
    s0 += hist[t] * static_cast<std::uint64_t>(t);
    const std::uint64_t n1 = total - n0;
    if (n0 == 0 || n1 == 0) continue;
    // N^2 * w0 * w1 * (mu0 - mu1)^2 == (s0 * N - S * n0)^2 / (n0 * n1)
    const auto d = static_cast<std::int64_t>(s0 * total) - static_cast<std::int64_t>(sum * n0);
    const auto ad = static_cast<unsigned __int128>(d < 0 ? -d : d);
    const detail::VarianceRatio cur{ad * ad, n0 * n1};
    if (best_t < 0 || best < cur) {
      best = cur;
      best_t = t;
    }
  }
  if (best_t < 0) {
    // Single distinct value.
    for (int v = 0; v < 256; ++v) {
      if (hist[v]) return static_cast<std::uint8_t>(v);
    }
  }
  return static_cast<std::uint8_t>(best_t);
}

inline BinaryMask threshold_above(const GradientImage& grad, std::uint8_t t) {
  BinaryMask mask(grad.width(), grad.height());
  auto dst = mask.values();
  const auto src = grad.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > t;
  return mask;
}

inline BinaryMask otsu_threshold(const GradientImage& grad) {
  return threshold_above(grad, otsu_level(grad));
}

// Canny edges without Gaussian pre-smoothing: 3x3 Sobel, L1 magnitude,
// non-maximum suppression over four direction sectors, hysteresis with
// magnitude > low for candidates and > high for seeds.
inline BinaryMask canny(const RasterImage& img, int low = 50, int high = 200) {
  if (img.channels() != 1) throw ShapeError("canny expects a 1-channel image");
  detail::require_min_size(img.width(), img.height(), 3, 3, "canny");
  if (low > high) std::swap(low, high);

  const int w = img.width();
  const int h = img.height();
  std::vector<int> dx, dy;
  detail::sobel_xy(img, dx, dy);

  // Magnitude and state maps padded by one pixel; padding has zero magnitude
  // and is never an edge.
  const int stride = w + 2;
  std::vector<int> mag(static_cast<std::size_t>(stride) * (h + 2), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      mag[static_cast<std::size_t>(y + 1) * stride + x + 1] = std::abs(dx[i]) + std::abs(dy[i]);
    }
  }

  enum : std::uint8_t { kCandidate = 0, kNone = 1, kEdge = 2 };
  std::vector<std::uint8_t> state(mag.size(), kNone);
  std::vector<std::size_t> stack;

  // tan(22.5 deg) in Q15.
  constexpr int kShift = 15;
  constexpr int kTan22 = static_cast<int>(0.4142135623730950488 * (1 << kShift) + 0.5);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y + 1) * stride + x + 1;
      const int m = mag[p];
      if (m <= low) continue;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const int gx = dx[i];
      const int gy = dy[i];
      const int ax = std::abs(gx);
      const int ay = std::abs(gy) << kShift;
      const int tg22 = ax * kTan22;
      bool is_max;
      if (ay < tg22) {
        is_max = m > mag[p - 1] && m >= mag[p + 1];
      } else if (ay > tg22 + (ax << (kShift + 1))) {
        is_max = m > mag[p - stride] && m >= mag[p + stride];
      } else {
        const int s = (gx ^ gy) < 0 ? -1 : 1;
        is_max = m > mag[p - stride - s] && m > mag[p + stride + s];
      }
      if (!is_max) continue;
      if (m > high) {
        state[p] = kEdge;
        stack.push_back(p);
      } else {
        state[p] = kCandidate;
      }
    }
  }

  const std::array<std::ptrdiff_t, 8> offsets = {-stride - 1, -stride, -stride + 1, -1,
                                                 1,           stride - 1, stride,  stride + 1};
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    for (auto off : offsets) {
      const std::size_t q = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + off);
      if (state[q] == kCandidate) {
        state[q] = kEdge;
        stack.push_back(q);
      }
    }
  }

  BinaryMask out(w, h);
  for (int y = 0; y < h; ++y) {
    std::uint8_t* dst = out.row(y);
    for (int x = 0; x < w; ++x) dst[x] = state[static_cast<std::size_t>(y + 1) * stride + x + 1] == kEdge;
  }
  return out;
}

inline BinaryMask dilate_rect(const BinaryMask& mask, int kernel_w, int kernel_h) {
  if (kernel_w < 1 || kernel_h < 1) throw ConfigError("structuring element must be at least 1x1");
  BinaryMask tmp(mask.width(), mask.height());
  BinaryMask out(mask.width(), mask.height());
  detail::rank_rows(mask, tmp, kernel_w, true);
  detail::rank_cols(tmp, out, kernel_h, true);
  return out;
}

inline BinaryMask erode_rect(const BinaryMask& mask, int kernel_w, int kernel_h) {
  if (kernel_w < 1 || kernel_h < 1) throw ConfigError("structuring element must be at least 1x1");
  BinaryMask tmp(mask.width(), mask.height());
  BinaryMask out(mask.width(), mask.height());
  detail::rank_rows(mask, tmp, kernel_w, false);
  detail::rank_cols(tmp, out, kernel_h, false);
  return out;
}

// Closing (dilation then erosion) with a kernel_w x kernel_h rectangle.
// Extensive and idempotent.
inline BinaryMask morph_close(const BinaryMask& mask, int kernel_w, int kernel_h) {
  return erode_rect(dilate_rect(mask, kernel_w, kernel_h), kernel_w, kernel_h);
}

// 8-connected labeling (two-pass, union-find). Labels are dense and numbered in
// raster order of each component's first pixel.
inline Components connected_components(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  LabelMap provisional(w, h, 0);
  std::vector<std::int32_t> parent{0};

  auto find = [&parent](std::int32_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  auto unite = [&](std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  for (int y = 0; y < h; ++y) {
    const std::uint8_t* m = mask.row(y);
    std::int32_t* cur = provisional.row(y);
    const std::int32_t* prev = y > 0 ? provisional.row(y - 1) : nullptr;
    for (int x = 0; x < w; ++x) {
      if (!m[x]) continue;
      std::int32_t label = 0;
      auto take = [&](std::int32_t n) {
        if (n == 0) return;
        if (label == 0) {
          label = n;
        } else if (n != label) {
          unite(label, n);
        }
      };
      if (x > 0) take(cur[x - 1]);
      if (prev) {
        if (x > 0) take(prev[x - 1]);
        take(prev[x]);
        if (x + 1 < w) take(prev[x + 1]);
      }
      if (label == 0) {
        label = static_cast<std::int32_t>(parent.size());
        parent.push_back(label);
      }
      cur[x] = label;
    }
  }

  Components out{LabelMap(w, h, 0), {}};
  std::vector<std::int32_t> final_label(parent.size(), 0);
  for (int y = 0; y < h; ++y) {
    const std::int32_t* src = provisional.row(y);
    std::int32_t* dst = out.labels.row(y);
    for (int x = 0; x < w; ++x) {
      if (!src[x]) continue;
      const auto root = find(src[x]);
      auto& f = final_label[root];
      if (f == 0) {
        f = static_cast<std::int32_t>(out.stats.size()) + 1;
        out.stats.push_back({f, 0, Box{x, y, 1, 1}});
      }
      dst[x] = f;
      auto& s = out.stats[f - 1];
      ++s.area;
      const int x0 = std::min(s.bbox.x, x);
      const int x1 = std::max(s.bbox.right(), x + 1);
      const int y1 = std::max(s.bbox.bottom(), y + 1);
      s.bbox = {x0, s.bbox.y, x1 - x0, y1 - s.bbox.y};
    }
  }
  return out;
}

// Bilinear resize with pixel-center alignment and 11-bit fixed-point weights.
inline RasterImage resize_bilinear(const RasterImage& img, int new_w, int new_h) {
  if (new_w < 1 || new_h < 1) {
    throw ShapeError("resize target must be at least 1x1, got " + std::to_string(new_w) + "x" +
                     std::to_string(new_h));
  }
  constexpr int kBits = 11;
  constexpr int kOne = 1 << kBits;
  struct Tap {
    int i0;
    int i1;
    int w0;
    int w1;
  };
  auto taps = [](int src, int dst) {
    std::vector<Tap> t(dst);
    const double scale = static_cast<double>(src) / dst;
    for (int d = 0; d < dst; ++d) {
      double pos = (d + 0.5) * scale - 0.5;
      int i0 = static_cast<int>(std::floor(pos));
      double frac = pos - i0;
      if (i0 < 0) {
        i0 = 0;
        frac = 0.0;
      }
      if (i0 >= src - 1) {
        i0 = src - 1;
        frac = 0.0;
      }
      const int w1 = static_cast<int>(std::lround(frac * kOne));
      t[d] = {i0, std::min(i0 + 1, src - 1), kOne - w1, w1};
    }
    return t;
  };
  const auto xs = taps(img.width(), new_w);
  const auto ys = taps(img.height(), new_h);
  const int ch = img.channels();

  RasterImage out(new_w, new_h, ch);
  std::vector<int> row0(static_cast<std::size_t>(new_w) * ch);
  std::vector<int> row1(static_cast<std::size_t>(new_w) * ch);
  auto hpass = [&](const std::uint8_t* src, std::vector<int>& dst) {
    for (int x = 0; x < new_w; ++x) {
      const Tap& t = xs[x];
      for (int c = 0; c < ch; ++c) {
        dst[static_cast<std::size_t>(x) * ch + c] = src[t.i0 * ch + c] * t.w0 + src[t.i1 * ch + c] * t.w1;
      }
    }
  };
  for (int y = 0; y < new_h; ++y) {
    const Tap& t = ys[y];
    hpass(img.row(t.i0), row0);
    hpass(img.row(t.i1), row1);
    std::uint8_t* dst = out.row(y);
    for (std::size_t i = 0; i < row0.size(); ++i) {
      const std::int64_t v = static_cast<std::int64_t>(row0[i]) * t.w0 + static_cast<std::int64_t>(row1[i]) * t.w1;
      dst[i] = static_cast<std::uint8_t>((v + (std::int64_t{1} << (2 * kBits - 1))) >> (2 * kBits));
    }
  }
  return out;
}

// Dimensions after shrinking by `factor`, each rounded to nearest.
inline std::pair<int, int> downsampled_size(int width, int height, double factor) {
  if (!(factor > 1.0)) throw ConfigError("downsample factor must exceed 1");
  return {static_cast<int>(std::lround(width / factor)), static_cast<int>(std::lround(height / factor))};
}

inline RasterImage downsample(const RasterImage& img, double factor) {
  const auto [w, h] = downsampled_size(img.width(), img.height(), factor);
  return resize_bilinear(img, w, h);
}

// Copies the part of `box` that lies inside the image.
inline RasterImage crop(const RasterImage& img, const Box& box) {
  const Box b = clip(box, img.width(), img.height());
  if (b.empty()) throw ShapeError("crop region lies outside the image");
  RasterImage out(b.w, b.h, img.channels());
  const std::size_t bytes = static_cast<std::size_t>(b.w) * img.channels();
  for (int y = 0; y < b.h; ++y) {
    const std::uint8_t* src = img.row(b.y + y) + static_cast<std::size_t>(b.x) * img.channels();
    std::copy(src, src + bytes, out.row(y));
  }
  return out;
}

// Summed-area table over a binary mask for O(1) foreground counts in a box.
class IntegralMask {
 public:
  explicit IntegralMask(const BinaryMask& mask)
      : width_(mask.width()), sums_(static_cast<std::size_t>(mask.width() + 1) * (mask.height() + 1), 0) {
    for (int y = 0; y < mask.height(); ++y) {
      const std::uint8_t* m = mask.row(y);
      std::int64_t row_sum = 0;
      for (int x = 0; x < mask.width(); ++x) {
        row_sum += m[x] != 0;
        sums_[idx(x + 1, y + 1)] = sums_[idx(x + 1, y)] + row_sum;
      }
    }
  }

  std::int64_t count(const Box& b) const noexcept {
    return sums_[idx(b.right(), b.bottom())] - sums_[idx(b.x, b.bottom())] - sums_[idx(b.right(), b.y)] +
           sums_[idx(b.x, b.y)];
  }

 private:
  std::size_t idx(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * (width_ + 1) + static_cast<std::size_t>(x);
  }

  int width_;
  std::vector<std::int64_t> sums_;
};

}  // namespace scenetext
