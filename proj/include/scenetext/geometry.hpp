#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <span>
#include <tuple>
#include <vector>

namespace scenetext {

// Axis-aligned integer rectangle; covers columns [x, x + w) and rows [y, y + h).
struct Box {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  constexpr int right() const noexcept { return x + w; }
  constexpr int bottom() const noexcept { return y + h; }
  constexpr std::int64_t area() const noexcept {
    return w > 0 && h > 0 ? static_cast<std::int64_t>(w) * h : 0;
  }
  constexpr bool empty() const noexcept { return w <= 0 || h <= 0; }

  friend constexpr bool operator==(const Box&, const Box&) = default;
  friend constexpr auto operator<=>(const Box&, const Box&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Box& b) {
  return os << "(" << b.x << ", " << b.y << ", " << b.w << ", " << b.h << ")";
}

constexpr Box intersect(const Box& a, const Box& b) noexcept {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right());
  const int y1 = std::min(a.bottom(), b.bottom());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

// True when `inner` lies entirely within `outer` (equal boxes included).
constexpr bool contains(const Box& outer, const Box& inner) noexcept {
  return inner.x >= outer.x && inner.y >= outer.y && inner.right() <= outer.right() &&
         inner.bottom() <= outer.bottom();
}

constexpr bool within(const Box& box, int width, int height) noexcept {
  return box.x >= 0 && box.y >= 0 && box.w >= 1 && box.h >= 1 && box.right() <= width &&
         box.bottom() <= height;
}

constexpr Box clip(const Box& box, int width, int height) noexcept {
  return intersect(box, Box{0, 0, width, height});
}

// Intersection area over the smaller of the two areas.
inline double overlap_ratio(const Box& a, const Box& b) noexcept {
  const auto smaller = std::min(a.area(), b.area());
  if (smaller == 0) return 0.0;
  return static_cast<double>(intersect(a, b).area()) / static_cast<double>(smaller);
}

inline double iou(const Box& a, const Box& b) noexcept {
  const auto inter = intersect(a, b).area();
  const auto uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// Two boxes share a text line when their vertical overlap is at least half the
// smaller height.
inline bool same_text_line(const Box& a, const Box& b) noexcept {
  const int overlap = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  const int smaller = std::min(a.h, b.h);
  return smaller > 0 && 2 * overlap >= smaller;
}

// Reading-order permutation: boxes are grouped into lines (transitive closure
// of same_text_line), lines run top to bottom, boxes within a line left to
// right. The result does not depend on input order.
inline std::vector<std::size_t> reading_order(std::span<const Box> boxes) {
  const std::size_t n = boxes.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (same_text_line(boxes[i], boxes[j])) {
        const auto a = find(i);
        const auto b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  // Per line: topmost edge, then leftmost edge as the line key.
  std::vector<std::pair<int, int>> line_key(n, {0, 0});
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = find(i);
    if (!seen[r]) {
      line_key[r] = {boxes[i].y, boxes[i].x};
      seen[r] = true;
    } else {
      line_key[r] = std::min(line_key[r], std::pair{boxes[i].y, boxes[i].x});
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ra = find(a);
    const auto rb = find(b);
    if (ra != rb) {
      if (line_key[ra] != line_key[rb]) return line_key[ra] < line_key[rb];
      return ra < rb;
    }
    const Box& ba = boxes[a];
    const Box& bb = boxes[b];
    return std::tie(ba.x, ba.y, ba.w, ba.h) < std::tie(bb.x, bb.y, bb.w, bb.h);
  });
  return order;
}

// Applies reading_order to any range of items carrying a box.
template <typename T, typename Proj>
std::vector<T> sort_by_reading_order(std::vector<T> items, Proj box_of) {
  std::vector<Box> boxes;
  boxes.reserve(items.size());
  for (const auto& item : items) boxes.push_back(std::invoke(box_of, item));
  const auto order = reading_order(boxes);
  std::vector<T> out;
  out.reserve(items.size());
  for (auto i : order) out.push_back(std::move(items[i]));
  return out;
}

}  // namespace scenetext
