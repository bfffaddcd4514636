#include <gtest/gtest.h>

#include <random>

#include <opencv2/imgproc.hpp>

#include "scenetext/imgproc.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace scenetext;

namespace {

RasterImage gray_from(int w, int h, std::initializer_list<int> values) {
  std::vector<std::uint8_t> px;
  for (int v : values) px.push_back(static_cast<std::uint8_t>(v));
  return RasterImage(w, h, 1, std::move(px));
}

cv::Mat plane_mat(const RasterImage& img) {
  return cv::Mat(img.height(), img.width(), CV_8UC1, const_cast<std::uint8_t*>(img.pixels().data())).clone();
}

template <typename P>
cv::Mat plane_mat(const P& plane) {
  cv::Mat m(plane.height(), plane.width(), CV_8UC1);
  for (int y = 0; y < plane.height(); ++y)
    for (int x = 0; x < plane.width(); ++x) m.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(plane.at(x, y));
  return m;
}

template <typename P>
bool equals_mat(const P& plane, const cv::Mat& m, bool binary = false) {
  for (int y = 0; y < plane.height(); ++y) {
    for (int x = 0; x < plane.width(); ++x) {
      int expected = m.at<std::uint8_t>(y, x);
      if (binary) expected = expected != 0;
      if (plane.at(x, y) != expected) return false;
    }
  }
  return true;
}

RasterImage channel(const RasterImage& img, int c) {
  RasterImage out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = img.at(x, y, c);
  return out;
}

}  // namespace

TEST(RasterImage, RejectsBadShapes) {
  EXPECT_THROW(RasterImage(0, 5, 1), ShapeError);
  EXPECT_THROW(RasterImage(5, 5, 2), ShapeError);
  EXPECT_THROW(RasterImage(2, 2, 3, std::vector<std::uint8_t>(11)), ShapeError);
  EXPECT_EQ(RasterImage(4, 3, 3).size(), 36u);
}

TEST(ToGrayscale, EqualChannelsKeepValue) {
  RasterImage img(5, 4, 3, 200);
  const auto g = to_grayscale(img);
  for (auto v : g.pixels()) EXPECT_EQ(v, 200);
  const auto black = to_grayscale(RasterImage(3, 3, 3, 0));
  for (auto v : black.pixels()) EXPECT_EQ(v, 0);
}

TEST(ToGrayscale, PrimaryColorsUseFixedLumaWeights) {
  RasterImage img(3, 1, 3);
  img.at(0, 0, 0) = 255;  // 0.299 * 255 = 76.245
  img.at(1, 0, 1) = 255;  // 0.587 * 255 = 149.685
  img.at(2, 0, 2) = 255;  // 0.114 * 255 = 29.07
  const auto g = to_grayscale(img);
  EXPECT_EQ(g.at(0, 0), 76);
  EXPECT_EQ(g.at(1, 0), 150);
  EXPECT_EQ(g.at(2, 0), 29);
}

TEST(ToGrayscale, RejectsSingleChannel) { EXPECT_THROW(to_grayscale(RasterImage(3, 3, 1)), ShapeError); }

TEST(SobelGx, ConstantImageIsZero) {
  std::mt19937 rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto v = static_cast<std::uint8_t>(rng() % 256);
    const auto g = sobel_gx(RasterImage(9, 7, 1, v));
    for (auto x : g.values()) ASSERT_EQ(x, 0);
  }
}

TEST(SobelGx, HandComputedPatch) {
  const auto img = gray_from(3, 3, {10, 20, 30, 40, 50, 60, 70, 80, 90});
  const auto g = sobel_gx(img);
  // Center: (30-10) + 2*(60-40) + (90-70) = 80.
  EXPECT_EQ(g.at(1, 1), 80);
  // Corner (0,0) with replicated borders: (20-10) + 2*(20-10) + (50-40) = 40.
  EXPECT_EQ(g.at(0, 0), 40);
  // Right column: replicated right neighbour, (30-20) + 2*(60-50) + (90-80) = 40.
  EXPECT_EQ(g.at(2, 1), 40);
}

TEST(SobelGx, StepEdgeRespondsOnlyAtTheStep) {
  RasterImage img(16, 8, 1, 0);
  for (int y = 0; y < 8; ++y)
    for (int x = 8; x < 16; ++x) img.at(x, y) = 255;
  const auto g = sobel_gx(img);
  for (int y = 0; y < 8; ++y) {
    EXPECT_EQ(g.at(7, y), 255);
    EXPECT_EQ(g.at(8, y), 255);
    EXPECT_EQ(g.at(2, y), 0);
    EXPECT_EQ(g.at(13, y), 0);
  }
}

TEST(SobelGx, MatchesOpenCvReplicateBorder) {
  std::mt19937 rng(7);
  for (int i = 0; i < 20; ++i) {
    const auto img = oracle::random_image(rng, 5 + rng() % 40, 5 + rng() % 40, 1);
    cv::Mat dx, ref;
    cv::Sobel(plane_mat(img), dx, CV_16S, 1, 0, 3, 1, 0, cv::BORDER_REPLICATE);
    cv::convertScaleAbs(dx, ref);
    ASSERT_TRUE(equals_mat(sobel_gx(img), ref));
  }
}

TEST(SobelGx, RejectsTinyImages) {
  EXPECT_THROW(sobel_gx(RasterImage(2, 5, 1)), ShapeError);
  EXPECT_THROW(sobel_gx(RasterImage(5, 2, 1)), ShapeError);
}

TEST(MorphGradientGx, ConstantIsZeroAndImpulseIsLocal) {
  const auto flat = morph_gradient_gx(RasterImage(6, 3, 1, 77));
  for (auto v : flat.values()) EXPECT_EQ(v, 0);
  RasterImage img(9, 3, 1, 0);
  img.at(4, 1) = 200;
  const auto g = morph_gradient_gx(img);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 9; ++x) {
      const bool near = y == 1 && x >= 3 && x <= 5;
      EXPECT_EQ(g.at(x, y), near ? 200 : 0) << x << "," << y;
    }
  }
}

TEST(MorphGradientGx, HorizontalRamp) {
  // dilate [10,20,30,30] - erode [0,0,10,20]
  const auto g = morph_gradient_gx(gray_from(4, 1, {0, 10, 20, 30}));
  EXPECT_EQ(g.at(0, 0), 10);
  EXPECT_EQ(g.at(1, 0), 20);
  EXPECT_EQ(g.at(2, 0), 20);
  EXPECT_EQ(g.at(3, 0), 10);
}

TEST(MorphGradientGx, IgnoresVerticalChange) {
  RasterImage img(5, 6, 1, 0);
  for (int x = 0; x < 5; ++x) img.at(x, 3) = 250;
  const auto g = morph_gradient_gx(img);
  for (auto v : g.values()) EXPECT_EQ(v, 0);
}

TEST(MorphGradientGx, MatchesOpenCvMorphologyGradient) {
  std::mt19937 rng(3);
  const cv::Mat kernel = cv::getStructuringElement(cv::MORPH_RECT, {3, 1});
  for (int i = 0; i < 20; ++i) {
    const auto img = oracle::random_image(rng, 3 + rng() % 40, 1 + rng() % 40, 1);
    cv::Mat ref;
    cv::morphologyEx(plane_mat(img), ref, cv::MORPH_GRADIENT, kernel, {-1, -1}, 1, cv::BORDER_REPLICATE);
    ASSERT_TRUE(equals_mat(morph_gradient_gx(img), ref));
  }
}

TEST(MaxChannelGx, IdenticalChannelsEqualSingleChannel) {
  std::mt19937 rng(5);
  const auto g = oracle::random_image(rng, 20, 12, 1);
  RasterImage rgb(20, 12, 3);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 20; ++x)
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = g.at(x, y);
  EXPECT_EQ(max_channel_gx(rgb, GradientMethod::sobel), sobel_gx(g));
  EXPECT_EQ(max_channel_gx(rgb, GradientMethod::morph), morph_gradient_gx(g));
}

TEST(MaxChannelGx, OnlyRedVaries) {
  std::mt19937 rng(9);
  auto rgb = oracle::random_image(rng, 16, 10, 3);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 16; ++x) rgb.at(x, y, 1) = 40, rgb.at(x, y, 2) = 90;
  EXPECT_EQ(max_channel_gx(rgb, GradientMethod::sobel), sobel_gx(channel(rgb, 0)));
}

TEST(MaxChannelGx, PixelwiseMaxProperty) {
  std::mt19937 rng(11);
  for (int i = 0; i < 30; ++i) {
    const auto rgb = oracle::random_image(rng, 3 + rng() % 30, 3 + rng() % 30, 3);
    for (auto method : {GradientMethod::sobel, GradientMethod::morph}) {
      const auto got = max_channel_gx(rgb, method);
      std::array<GradientImage, 3> per;
      for (int c = 0; c < 3; ++c) {
        per[c] = method == GradientMethod::sobel ? sobel_gx(channel(rgb, c)) : morph_gradient_gx(channel(rgb, c));
      }
      for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x)
          ASSERT_EQ(got.at(x, y), std::max({per[0].at(x, y), per[1].at(x, y), per[2].at(x, y)}));
    }
  }
}

TEST(MaxChannelGx, RejectsGray) { EXPECT_THROW(max_channel_gx(RasterImage(5, 5, 1), GradientMethod::morph), ShapeError); }

TEST(Otsu, BimodalSplitsExactly) {
  GradientImage g(10, 10);
  for (int i = 0; i < 100; ++i) g.values()[i] = i % 2 ? 240 : 10;
  const auto t = otsu_level(g);
  EXPECT_GE(t, 10);
  EXPECT_LT(t, 240);
  const auto mask = otsu_threshold(g);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(mask.values()[i], i % 2 ? 1 : 0);
}

TEST(Otsu, ConstantImageIsAllBackground) {
  for (int v : {0, 17, 255}) {
    GradientImage g(8, 8, static_cast<std::uint8_t>(v));
    EXPECT_EQ(otsu_level(g), v);
    EXPECT_EQ(count_foreground(otsu_threshold(g)), 0u);
  }
}

TEST(Otsu, MatchesExhaustiveOracle) {
  std::mt19937 rng(2024);
  for (int i = 0; i < 120; ++i) {
    GradientImage g(64, 64);
    // Mix of full-range noise, few-level images (many exact ties) and
    // gradient images of random inputs.
    const int kind = i % 3;
    if (kind == 0) {
      for (auto& v : g.values()) v = static_cast<std::uint8_t>(rng() % 256);
    } else if (kind == 1) {
      const int levels = 2 + static_cast<int>(rng() % 4);
      for (auto& v : g.values()) v = static_cast<std::uint8_t>((rng() % levels) * (255 / levels));
    } else {
      g = sobel_gx(oracle::random_image(rng, 64, 64, 1));
    }
    ASSERT_EQ(otsu_level(g), oracle::otsu(g)) << "image " << i;
  }
}

TEST(Canny, ConstantImageHasNoEdges) {
  EXPECT_EQ(count_foreground(canny(RasterImage(20, 20, 1, 128))), 0u);
}

TEST(Canny, StepEdgeGivesOnePixelWideLine) {
  RasterImage img(20, 12, 1, 0);
  for (int y = 0; y < 12; ++y)
    for (int x = 10; x < 20; ++x) img.at(x, y) = 255;
  const auto e = canny(img);
  for (int y = 0; y < 12; ++y) {
    int n = 0;
    for (int x = 0; x < 20; ++x) n += e.at(x, y);
    EXPECT_EQ(n, 1) << "row " << y;
    EXPECT_TRUE(e.at(9, y) || e.at(10, y));
  }
}

TEST(Canny, RectangleOutlineMatchesOpenCv) {
  cv::Mat m(80, 120, CV_8UC1, cv::Scalar(30));
  cv::rectangle(m, cv::Rect(20, 15, 70, 40), cv::Scalar(220), cv::FILLED);
  RasterImage img(120, 80, 1);
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 120; ++x) img.at(x, y) = m.at<std::uint8_t>(y, x);
  cv::Mat ref;
  cv::Canny(m, ref, 50, 200, 3, false);
  const auto edges = canny(img);
  EXPECT_TRUE(equals_mat(edges, ref, true));
  // Closed contour: the outline forms a single 8-connected component.
  EXPECT_EQ(connected_components(edges).count(), 1);
}

TEST(Canny, RenderedTextMatchesOpenCv) {
  const auto scene = synth::single_word("MERKEZ", 30);
  const auto gray = to_grayscale(scene.image);
  cv::Mat ref;
  cv::Canny(plane_mat(gray), ref, 50, 200, 3, false);
  EXPECT_TRUE(equals_mat(canny(gray), ref, true));
}

TEST(MorphClose, FillsGapWithinKernel) {
  BinaryMask m(40, 11);
  m.at(10, 5) = 1;
  m.at(15, 5) = 1;
  const auto c = morph_close(m, 17, 5);
  for (int x = 10; x <= 15; ++x) EXPECT_EQ(c.at(x, 5), 1) << x;
  EXPECT_EQ(c.at(9, 5), 0);
  EXPECT_EQ(c.at(16, 5), 0);
}

TEST(MorphClose, EmptyStaysEmpty) { EXPECT_EQ(count_foreground(morph_close(BinaryMask(30, 20), 17, 5)), 0u); }

TEST(MorphClose, ExtensiveAndIdempotent) {
  std::mt19937 rng(77);
  for (int i = 0; i < 60; ++i) {
    const auto m = oracle::random_mask(rng, 5 + rng() % 60, 5 + rng() % 60, 0.05 + 0.3 * (rng() % 100) / 100.0);
    const int kw = 1 + rng() % 18;
    const int kh = 1 + rng() % 6;
    const auto once = morph_close(m, kw, kh);
    for (std::size_t k = 0; k < m.size(); ++k) ASSERT_TRUE(!m.values()[k] || once.values()[k]);
    ASSERT_EQ(morph_close(once, kw, kh), once) << kw << "x" << kh;
  }
}

TEST(MorphClose, MatchesDefinition) {
  std::mt19937 rng(78);
  for (int i = 0; i < 40; ++i) {
    const auto m = oracle::random_mask(rng, 3 + rng() % 30, 3 + rng() % 30, 0.15);
    const int kw = 1 + rng() % 12;
    const int kh = 1 + rng() % 6;
    ASSERT_EQ(morph_close(m, kw, kh), oracle::close_by_definition(m, kw, kh)) << kw << "x" << kh;
  }
}

TEST(MorphClose, RejectsEmptyKernel) { EXPECT_THROW(morph_close(BinaryMask(4, 4), 0, 3), ConfigError); }

TEST(ConnectedComponents, EmptyMask) {
  const auto cc = connected_components(BinaryMask(10, 10));
  EXPECT_EQ(cc.count(), 0);
}

TEST(ConnectedComponents, FilledRectangle) {
  BinaryMask m(30, 20);
  for (int y = 4; y < 12; ++y)
    for (int x = 5; x < 25; ++x) m.at(x, y) = 1;
  const auto cc = connected_components(m);
  ASSERT_EQ(cc.count(), 1);
  EXPECT_EQ(cc.stats[0].area, 160);
  EXPECT_EQ(cc.stats[0].bbox, (Box{5, 4, 20, 8}));
  EXPECT_DOUBLE_EQ(cc.stats[0].extent(), 1.0);
}

TEST(ConnectedComponents, DiagonalNeighboursJoin) {
  BinaryMask m(4, 4);
  m.at(0, 0) = m.at(1, 1) = m.at(2, 2) = 1;
  m.at(3, 0) = 1;
  const auto cc = connected_components(m);
  EXPECT_EQ(cc.count(), 2);
}

TEST(ConnectedComponents, MatchesFloodFillOracle) {
  std::mt19937 rng(99);
  for (int i = 0; i < 80; ++i) {
    const int w = 1 + rng() % 64;
    const int h = 1 + rng() % 64;
    const auto m = oracle::random_mask(rng, w, h, 0.1 + 0.5 * (rng() % 100) / 100.0);
    int count = 0;
    const auto expected = oracle::flood_fill_labels(m, count);
    const auto cc = connected_components(m);
    ASSERT_EQ(cc.count(), count);
    std::int64_t area_sum = 0;
    for (const auto& s : cc.stats) {
      area_sum += s.area;
      ASSERT_LE(s.area, s.bbox.area());
      ASSERT_TRUE(within(s.bbox, w, h));
    }
    ASSERT_EQ(static_cast<std::size_t>(area_sum), count_foreground(m));
    for (std::size_t k = 0; k < expected.size(); ++k) ASSERT_EQ(cc.labels.values()[k], expected[k]);
  }
}

TEST(Downsample, DimensionsFollowRounding) {
  const auto d = downsample(RasterImage(1024, 576, 3, 9), 1.4);
  EXPECT_EQ(d.width(), 731);
  EXPECT_EQ(d.height(), 411);
}

TEST(Downsample, ConstantStaysConstant) {
  for (int v : {0, 1, 128, 254, 255}) {
    const auto d = downsample(RasterImage(97, 61, 3, static_cast<std::uint8_t>(v)), 1.4);
    for (auto p : d.pixels()) ASSERT_EQ(p, v);
  }
}

TEST(Downsample, TwoByTwoToOneAveragesAllFour) {
  const auto d = downsample(gray_from(2, 2, {10, 20, 30, 40}), 2.0);
  ASSERT_EQ(d.width(), 1);
  EXPECT_EQ(d.at(0, 0), 25);
}

TEST(Downsample, Errors) {
  EXPECT_THROW(downsample(RasterImage(4, 4, 1), 1.0), ConfigError);
  EXPECT_THROW(downsample(RasterImage(1, 1, 1), 3.0), ShapeError);
}

TEST(Crop, CopiesClippedRegion) {
  std::mt19937 rng(4);
  const auto img = oracle::random_image(rng, 10, 8, 3);
  const auto c = crop(img, {7, 5, 10, 10});
  ASSERT_EQ(c.width(), 3);
  ASSERT_EQ(c.height(), 3);
  EXPECT_EQ(c.at(0, 0, 2), img.at(7, 5, 2));
  EXPECT_EQ(c.at(2, 2, 1), img.at(9, 7, 1));
  EXPECT_THROW(crop(img, {20, 20, 2, 2}), ShapeError);
}

TEST(IntegralMask, CountsMatchBruteForce) {
  std::mt19937 rng(8);
  const auto m = oracle::random_mask(rng, 23, 17, 0.4);
  const IntegralMask integral(m);
  for (int i = 0; i < 200; ++i) {
    const int x = rng() % 23, y = rng() % 17;
    const Box b{x, y, 1 + static_cast<int>(rng() % (23 - x)), 1 + static_cast<int>(rng() % (17 - y))};
    std::int64_t n = 0;
    for (int yy = b.y; yy < b.bottom(); ++yy)
      for (int xx = b.x; xx < b.right(); ++xx) n += m.at(xx, yy);
    ASSERT_EQ(integral.count(b), n);
  }
}
