#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "teleop/vision/detect.hpp"
#include "teleop/vision/gaussian.hpp"
#include "teleop/vision/haar.hpp"
#include "teleop/vision/hog.hpp"
#include "teleop/vision/integral.hpp"
#include "teleop/vision/resize.hpp"

using namespace teleop;
using namespace teleop::vision;

namespace {

GrayImage uniform(int w, int h, std::uint8_t v) { return GrayImage(w, h, v); }

// Dark 16x40 figure on a light background.
GrayImage sprite_image(int w, int h, int sx, int sy, int sw = 16, int sh = 40) {
  GrayImage img(w, h, 200);
  for (int y = sy; y < sy + sh; ++y)
    for (int x = sx; x < sx + sw; ++x) img.at(x, y) = 30;
  return img;
}

// Two-stage cascade keyed to sprite_image: dark centre column between light
// flanks, then a dark top half.
CascadeModel sprite_cascade() {
  CascadeModel m{32, 64, {}};
  HaarFeature centre{{{{0, 8, 8, 48}, 1.0}, {{24, 8, 8, 48}, 1.0}, {{8, 8, 16, 48}, -1.0}}, 32, 64};
  HaarFeature top{{{{8, 0, 16, 32}, -1.0}, {{8, 32, 16, 32}, 1.0}}, 32, 64};
  m.stages.push_back({0.5, {{centre, 60000.0, 0.0, 1.0}}});
  m.stages.push_back({0.5, {{top, -20000.0, 0.0, 1.0}}});
  return m;
}

}  // namespace

TEST(GaussianKernel, RadiusZeroIsSingleOne) {
  const auto k = gaussian_kernel({0.7, 2.0, 0, 0, 0});
  ASSERT_EQ(k.weights.size(), 1u);
  EXPECT_EQ(k.weights[0], 1.0);
}

TEST(GaussianKernel, MatchesDirectEvaluation) {
  for (const GaussianKernelParams p : {GaussianKernelParams{0.5, 0.5, 0, 0, 1}, GaussianKernelParams{1.0, 2.0, 0.3, -0.2, 3},
                                       GaussianKernelParams{1.0, 1.0, 0, 0, 2}}) {
    const auto k = gaussian_kernel(p);
    const auto ref = oracle::gaussian_weights(p);
    ASSERT_EQ(k.weights.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(k.weights[i], ref[i], 1e-15);
  }
}

TEST(GaussianKernel, SumsToOneAndSymmetric) {
  const auto k = gaussian_kernel({1.0, 1.0, 0, 0, 2});
  EXPECT_NEAR(std::accumulate(k.weights.begin(), k.weights.end(), 0.0), 1.0, 1e-12);
  for (int y = -2; y <= 2; ++y)
    for (int x = -2; x <= 2; ++x) {
      EXPECT_EQ(k.at(x, y), k.at(-x, y));
      EXPECT_EQ(k.at(x, y), k.at(x, -y));
      EXPECT_LE(k.at(x, y), k.at(0, 0));
    }
}

TEST(GaussianKernel, RejectsNonPositiveSigma) {
  EXPECT_THROW(gaussian_kernel({0.0, 1.0, 0, 0, 1}), InvalidParameter);
  EXPECT_THROW(gaussian_kernel({1.0, -1.0, 0, 0, 1}), InvalidParameter);
}

TEST(GaussianBlur, ConstantImageUnchanged) {
  const auto img = uniform(31, 17, 77);
  EXPECT_EQ(gaussian_blur(img, {}), img);
}

TEST(GaussianBlur, ImpulseSpreadsAsKernel) {
  GrayImage img(9, 9, 0);
  img.at(4, 4) = 200;
  const GaussianKernelParams p{0.8, 0.8, 0, 0, 1};
  const auto out = gaussian_blur(img, p);
  const auto k = oracle::gaussian_weights(p);
  for (int dy = -1; dy <= 1; ++dy)
    for (int dx = -1; dx <= 1; ++dx)
      EXPECT_NEAR(out.at(4 + dx, 4 + dy), 200 * k[(dy + 1) * 3 + dx + 1], 1.0) << dx << "," << dy;
  EXPECT_EQ(out.at(0, 0), 0);
}

TEST(GaussianBlur, SeparableWithinOneOfDirect) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const auto img = oracle::random_gray(rng, 20 + i % 13, 15 + i % 7);
    const GaussianKernelParams p{0.6 + 0.02 * i, 0.6 + 0.02 * i, 0, 0, 1 + i % 3};
    const auto a = gaussian_blur(img, p), b = oracle::blur_direct(img, p);
    for (std::size_t j = 0; j < a.data().size(); ++j) ASSERT_LE(std::abs(a.data()[j] - b.data()[j]), 1);
  }
}

TEST(Integral, SmallCases) {
  const auto ones = uniform(3, 3, 1);
  EXPECT_EQ(integral_image(ones).at(3, 3), 9u);
  const auto one = uniform(1, 1, 255);
  const auto ii = integral_image(one);
  EXPECT_EQ(ii.at(0, 0), 0u);
  EXPECT_EQ(ii.at(1, 0), 0u);
  EXPECT_EQ(ii.at(0, 1), 0u);
  EXPECT_EQ(ii.at(1, 1), 255u);
}

TEST(Integral, RandomRectsExact) {
  std::mt19937_64 rng(9);
  const auto img = oracle::random_gray(rng, 64, 64);
  const auto ii = integral_image(img);
  for (int i = 0; i < 1000; ++i) {
    const auto r = oracle::random_rect(rng, 64, 64);
    ASSERT_EQ(rect_sum(ii, r), oracle::rect_sum(img, r));
  }
  EXPECT_EQ(rect_sum(ii, {0, 0, 64, 64}), oracle::rect_sum(img, {0, 0, 64, 64}));
  EXPECT_EQ(rect_sum(ii, {5, 5, 0, 10}), 0u);
  EXPECT_EQ(rect_sum(ii, {5, 5, 10, 0}), 0u);
}

TEST(Integral, MonotoneTable) {
  std::mt19937_64 rng(10);
  const auto ii = integral_image(oracle::random_gray(rng, 20, 30));
  for (int y = 0; y <= 30; ++y)
    for (int x = 0; x <= 20; ++x) {
      if (x > 0) {
        EXPECT_GE(ii.at(x, y), ii.at(x - 1, y));
      }
      if (y > 0) {
        EXPECT_GE(ii.at(x, y), ii.at(x, y - 1));
      }
    }
}

TEST(Integral, OutOfBoundsRect) {
  const auto ii = integral_image(uniform(10, 10, 1));
  EXPECT_THROW(rect_sum(ii, {5, 5, 6, 1}), BoundsError);
  EXPECT_THROW(rect_sum(ii, {-1, 0, 2, 2}), BoundsError);
}

TEST(Haar, UniformImageCancels) {
  const auto ii = integral_image(uniform(40, 40, 123));
  HaarFeature f{{{{0, 0, 8, 16}, 1.0}, {{8, 0, 8, 16}, -1.0}}, 16, 16};
  EXPECT_EQ(haar_feature_value(ii, f, {3, 4}, 1.0), 0.0);
  EXPECT_EQ(haar_feature_value(ii, f, {3, 4}, 1.5), 0.0);
}

TEST(Haar, EdgeMatchesNaiveAndIsLinear) {
  GrayImage img(40, 20, 0);
  for (int y = 0; y < 20; ++y)
    for (int x = 20; x < 40; ++x) img.at(x, y) = 255;
  const auto ii = integral_image(img);
  HaarFeature f{{{{0, 0, 10, 20}, 1.0}, {{10, 0, 10, 20}, -1.0}}, 20, 20};
  const double v = haar_feature_value(ii, f, {10, 0}, 1.0);
  EXPECT_EQ(v, oracle::haar_value(img, f, 10, 0, 1.0));
  EXPECT_EQ(v, -255.0 * 200);
  HaarFeature g = f;
  for (auto& r : g.rects) r.weight *= 2;
  EXPECT_EQ(haar_feature_value(ii, g, {10, 0}, 1.0), 2 * v);
}

TEST(Haar, RandomFeaturesMatchNaive) {
  std::mt19937_64 rng(12);
  for (int n = 0; n < 20; ++n) {
    const auto img = oracle::random_gray(rng, 80, 90);
    const auto ii = integral_image(img);
    for (int k = 0; k < 50; ++k) {
      HaarFeature f{{}, 24, 24};
      for (int r = 0; r < 3; ++r) f.rects.push_back({oracle::random_rect(rng, 24, 24), r == 0 ? 1.0 : -0.5});
      const double scale = 1.0 + (rng() % 8) / 5.0;
      const int ox = static_cast<int>(rng() % 20), oy = static_cast<int>(rng() % 20);
      ASSERT_EQ(haar_feature_value(ii, f, {ox, oy}, scale), oracle::haar_value(img, f, ox, oy, scale));
    }
  }
}

TEST(Haar, FeatureValidation) {
  EXPECT_THROW((HaarFeature{{{{0, 0, 4, 4}, 1.0}}, 8, 8}.validate()), InvalidParameter);
  EXPECT_THROW((HaarFeature{{{{0, 0, 4, 4}, 1.0}, {{4, 0, 4, 4}, 1.0}}, 8, 8}.validate()), InvalidParameter);
  EXPECT_THROW((HaarFeature{{{{0, 0, 4, 4}, 1.0}, {{6, 0, 4, 4}, -1.0}}, 8, 8}.validate()), InvalidParameter);
  EXPECT_NO_THROW((HaarFeature{{{{0, 0, 4, 4}, 1.0}, {{4, 0, 4, 4}, -1.0}}, 8, 8}.validate()));
}

TEST(Cascade, VacuousAndForcedReject) {
  const auto ii = integral_image(uniform(64, 64, 10));
  HaarFeature f{{{{0, 0, 8, 8}, 1.0}, {{8, 0, 8, 8}, -1.0}}, 16, 16};
  CascadeModel pass{16, 16, {{-INFINITY, {{f, 0.0, 0.0, 0.0}}}}};
  auto r = evaluate_cascade(ii, pass, {0, 0}, 1.0);
  EXPECT_TRUE(r.accepted);
  EXPECT_EQ(r.stages_evaluated, 1);
  CascadeModel reject{16, 16, {{INFINITY, {{f, 0.0, 0.0, 0.0}}}, {-INFINITY, {{f, 0.0, 0.0, 0.0}}}}};
  r = evaluate_cascade(ii, reject, {0, 0}, 1.0);
  EXPECT_FALSE(r.accepted);
  EXPECT_EQ(r.stages_evaluated, 1);
  EXPECT_THROW(evaluate_cascade(ii, CascadeModel{16, 16, {}}, {0, 0}, 1.0), InvalidParameter);
}

TEST(Cascade, EarlyExitMatchesFullEvaluation) {
  const auto m = sprite_cascade();
  std::mt19937_64 rng(3);
  for (int n = 0; n < 20; ++n) {
    auto img = sprite_image(96, 128, 8 + static_cast<int>(rng() % 60), 4 + static_cast<int>(rng() % 60));
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(std::clamp<int>(v + static_cast<int>(rng() % 41) - 20, 0, 255));
    const auto ii = integral_image(img);
    for (int y = 0; y + 64 <= 128; y += 4)
      for (int x = 0; x + 32 <= 96; x += 4) {
        const auto r = evaluate_cascade(ii, m, {x, y}, 1.0);
        ASSERT_EQ(r.accepted, oracle::cascade_accepts(img, m, x, y, 1.0));
        ASSERT_LE(r.stages_evaluated, 2);
      }
  }
}

TEST(Cascade, TextRoundTripAndErrors) {
  const auto m = sprite_cascade();
  std::stringstream ss;
  write_cascade(ss, m);
  const auto back = parse_cascade(ss);
  ASSERT_EQ(back.stages.size(), 2u);
  EXPECT_EQ(back.stages[1].weak_classifiers[0].split_threshold, -20000.0);
  std::istringstream bad("cascade v1 32 64 2\nstage 0.5 1\nweak 1 0 1 2\nrect 0 0 4 4 1\n");
  try {
    parse_cascade(bad, "bad.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.txt"), std::string::npos);
  }
  std::istringstream hdr("svm v1 3\n");
  EXPECT_THROW(parse_cascade(hdr), ParseError);
}

TEST(Hog, DescriptorLength) {
  HogParams p;
  EXPECT_EQ(p.descriptor_length(), 7 * 15 * 4 * 9);
  EXPECT_EQ(hog_descriptor(uniform(64, 128, 5), p).size(), 3780u);
  EXPECT_THROW(hog_descriptor(uniform(64, 120, 5), p), InvalidInput);
}

TEST(Hog, UniformWindowIsZero) {
  for (double v : hog_descriptor(uniform(64, 128, 90), {})) EXPECT_EQ(v, 0.0);
}

TEST(Hog, VerticalEdgeVotesZeroDegreeBin) {
  GrayImage img(64, 128, 0);
  for (int y = 0; y < 128; ++y)
    for (int x = 36; x < 64; ++x) img.at(x, y) = 255;
  const HogParams p;
  const HogGrid grid(img, p);
  const auto h = grid.cell_histogram(4, 3);  // cell spanning x 32..39
  const auto ref = oracle::cell_histogram(img, 4, 3, p);
  for (int b = 0; b < p.bins; ++b) EXPECT_NEAR(h[b], ref[b], 1e-9);
  EXPECT_GT(h[0], 0.0);
  for (int b = 1; b < p.bins; ++b) EXPECT_EQ(h[b], 0.0);
}

TEST(Hog, MatchesScalarReference) {
  std::mt19937_64 rng(21);
  const HogParams p;
  for (int n = 0; n < 10; ++n) {
    const auto img = oracle::random_gray(rng, 64, 128);
    const auto a = hog_descriptor(img, p), b = oracle::hog(img, p);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(Hog, BlockNormsBoundedAndDeterministic) {
  std::mt19937_64 rng(22);
  const HogParams p;
  for (int n = 0; n < 100; ++n) {
    const auto img = oracle::random_gray(rng, 64, 128);
    const auto d = hog_descriptor(img, p);
    for (std::size_t b = 0; b < d.size(); b += p.block_length()) {
      double s = 0;
      for (int i = 0; i < p.block_length(); ++i) s += d[b + i] * d[b + i];
      ASSERT_LE(std::sqrt(s), 1.0 + 1e-6);
    }
    if (n < 3) {
      EXPECT_EQ(d, hog_descriptor(img, p));
    }
  }
}

TEST(Hog, GridAtOriginEqualsWindowDescriptor) {
  std::mt19937_64 rng(24);
  const auto img = oracle::random_gray(rng, 64, 128);
  EXPECT_EQ(HogGrid(img, {}).descriptor_at(0, 0), hog_descriptor(img, {}));
}

TEST(Hog, GridDotEqualsDescriptorDot) {
  std::mt19937_64 rng(23);
  const HogParams p;
  const auto img = oracle::random_gray(rng, 96, 160);
  const HogGrid grid(img, p);
  std::vector<double> w(p.descriptor_length());
  for (auto& x : w) x = static_cast<double>(rng() % 2001) / 1000.0 - 1.0;
  for (int cy = 0; cy + p.cells_y() <= grid.cells_y(); ++cy)
    for (int cx = 0; cx + p.cells_x() <= grid.cells_x(); ++cx) {
      const auto d = grid.descriptor_at(cx, cy);
      EXPECT_NEAR(grid.dot_at(cx, cy, w), std::inner_product(d.begin(), d.end(), w.begin(), 0.0), 1e-9);
    }
}

TEST(Svm, ScoreIdentitiesAndOracle) {
  LinearSvmModel m{std::vector<double>(10, 0.0), 1.5, 0.0};
  EXPECT_EQ(svm_score(std::vector<double>(10, 3.0), m), 1.5);
  std::mt19937_64 rng(4);
  for (int n = 0; n < 100; ++n) {
    std::vector<double> w(50), d(50);
    for (auto& x : w) x = std::ldexp(static_cast<double>(rng() % 100000), -14) - 3;
    for (auto& x : d) x = std::ldexp(static_cast<double>(rng() % 100000), -16);
    LinearSvmModel mm{w, 0.25, 0.0};
    double ref = 0.25;
    for (int i = 0; i < 50; ++i) ref += w[i] * d[i];
    EXPECT_NEAR(svm_score(d, mm), ref, 1e-9);
    double sq = 0;
    for (double x : w) sq += x * x;
    EXPECT_NEAR(svm_score(w, LinearSvmModel{w, 0.0, 0.0}), sq, 1e-9);
  }
  EXPECT_THROW(svm_score(std::vector<double>(9, 0.0), m), InvalidInput);
}

TEST(Svm, TextRoundTrip) {
  LinearSvmModel m{{0.5, -1.25, 3.0}, 0.125, -0.5};
  std::stringstream ss;
  write_svm(ss, m);
  const auto back = parse_svm(ss);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.bias, m.bias);
  EXPECT_EQ(back.threshold, m.threshold);
  std::istringstream bad("svm v1 4\n1 2 3\n0 0\n");
  EXPECT_THROW(parse_svm(bad), ParseError);
}

TEST(Resize, AreaAndBilinearBasics) {
  const auto img = uniform(90, 60, 99);
  EXPECT_EQ(resize_area(img, 30, 20), uniform(30, 20, 99));
  EXPECT_EQ(resize_bilinear(img, 45, 30), uniform(45, 30, 99));
  std::mt19937_64 rng(1);
  const auto r = oracle::random_gray(rng, 33, 21);
  EXPECT_EQ(resize_bilinear(r, 33, 21), r);
  GrayImage two(4, 2, 0);
  for (int x = 0; x < 4; ++x) two.at(x, 1) = 10;
  EXPECT_EQ(resize_area(two, 2, 1), uniform(2, 1, 5));
}

TEST(Detect, BlankImageNoDetections) {
  const auto img = uniform(200, 200, 100);
  EXPECT_TRUE(sliding_window_detect(img, sprite_cascade(), {}).empty());
}

TEST(Detect, OneWindowImageEvaluatesOnce) {
  DetectionStats st;
  sliding_window_detect(uniform(32, 64, 1), sprite_cascade(), {1.2, 0, 0, 8, 64}, &st);
  EXPECT_EQ(st.windows_evaluated, 1u);
  EXPECT_EQ(st.levels, 1);
  DetectionStats none;
  EXPECT_TRUE(sliding_window_detect(uniform(31, 64, 1), sprite_cascade(), {}, &none).empty());
  EXPECT_EQ(none.windows_evaluated, 0u);
}

TEST(Detect, SpriteFoundAndMatchesExhaustiveOracle) {
  const auto img = sprite_image(160, 160, 70, 50);
  const auto m = sprite_cascade();
  const PyramidParams pp{1.2, 0, 0, 4, 64};
  const auto dets = sliding_window_detect(img, m, pp);
  ASSERT_FALSE(dets.empty());

  // Level 0 answers must be exactly the windows the no-early-exit oracle accepts.
  std::vector<Rect> expect;
  for (int y = 0; y + 64 <= 160; y += 4)
    for (int x = 0; x + 32 <= 160; x += 4)
      if (oracle::cascade_accepts(img, m, x, y, 1.0)) expect.push_back({x, y, 32, 64});
  std::vector<Rect> got;
  for (const auto& d : dets) {
    EXPECT_TRUE(d.bbox.inside(160, 160));
    if (d.scale == 1.0) got.push_back(d.bbox);
  }
  EXPECT_EQ(got, expect);
  for (const auto& r : got) EXPECT_TRUE(r.contains(78, 70));
}

TEST(Detect, HogSvmPathRunsAndOrders) {
  std::mt19937_64 rng(8);
  const auto img = oracle::random_gray(rng, 100, 170);
  HogSvmDetector det{HogParams{}, LinearSvmModel{std::vector<double>(3780, 0.0), 1.0, 0.0}};
  DetectionStats st;
  const auto dets = sliding_window_detect(img, det, {1.2, 0, 0, 8, 64}, &st);
  EXPECT_EQ(dets.size(), st.windows_evaluated);  // score == bias > threshold everywhere
  for (std::size_t i = 1; i < dets.size(); ++i) {
    const auto& a = dets[i - 1];
    const auto& b = dets[i];
    ASSERT_TRUE(a.scale < b.scale || (a.scale == b.scale && (a.bbox.y < b.bbox.y || (a.bbox.y == b.bbox.y && a.bbox.x < b.bbox.x))));
  }
}

TEST(Nms, SmallCases) {
  std::vector<Detection> one{{{1, 2, 10, 10}, 0.5, 1.0}};
  EXPECT_EQ(non_max_suppression(one, 0.5).size(), 1u);
  std::vector<Detection> two{{{5, 5, 10, 10}, 0.7, 1.0}, {{5, 5, 10, 10}, 0.9, 1.0}};
  auto kept = non_max_suppression(two, 0.5);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].person_score, 0.9);
  std::vector<Detection> tie{{{7, 5, 10, 10}, 0.9, 1.0}, {{5, 5, 10, 10}, 0.9, 1.0}};
  kept = non_max_suppression(tie, 0.5);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].bbox.x, 5);
}

TEST(Nms, RandomMatchesQuadraticReference) {
  std::mt19937_64 rng(77);
  for (int n = 0; n < 200; ++n) {
    std::vector<Detection> dets;
    for (int i = 0; i < 20; ++i) {
      Rect r = oracle::random_rect(rng, 60, 60);
      r.w = std::max(r.w, 1);
      r.h = std::max(r.h, 1);
      dets.push_back({r, static_cast<double>(rng() % 10) / 10.0, 1.0});
    }
    const double thr = n % 2 ? 0.5 : 0.3;
    const auto got = non_max_suppression(dets, thr);
    const auto want = oracle::nms(dets, thr);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_EQ(got[i].bbox, want[i].bbox);
      ASSERT_EQ(got[i].person_score, want[i].person_score);
    }
    for (std::size_t i = 0; i < got.size(); ++i)
      for (std::size_t j = i + 1; j < got.size(); ++j) ASSERT_LE(oracle::iou(got[i].bbox, got[j].bbox), thr);
    EXPECT_NEAR(iou(dets[0].bbox, dets[1].bbox), oracle::iou(dets[0].bbox, dets[1].bbox), 1e-12);
  }
}

TEST(Luma, Bt601Rounding) {
  EXPECT_EQ(luma(255, 255, 255), 255);
  EXPECT_EQ(luma(0, 0, 0), 0);
  EXPECT_EQ(luma(255, 0, 0), 76);   // 76.245
  EXPECT_EQ(luma(0, 255, 0), 150);  // 149.685
  EXPECT_EQ(luma(0, 0, 255), 29);   // 29.07
}

TEST(Nms, EnclosingWindowSuppressed) {
  const Detection tight{{100, 100, 32, 64}, 8.0, 1.0};
  const Detection loose{{80, 60, 67, 134}, 2.0, 2.0};
  const Detection apart{{400, 100, 32, 64}, 1.0, 1.0};
  EXPECT_LT(iou(tight.bbox, loose.bbox), 0.3);
  EXPECT_EQ(overlap_of_smaller(tight.bbox, loose.bbox), 1.0);
  EXPECT_EQ(non_max_suppression({tight, loose, apart}, 0.3).size(), 3u);
  const auto kept = suppress_enclosing({loose, apart, tight}, 0.8);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].bbox, tight.bbox);
  EXPECT_EQ(kept[1].bbox, apart.bbox);
  EXPECT_EQ(suppress_enclosing({tight, loose, apart}, 1.0).size(), 3u);
  // Half-overlapping neighbours survive.
  const Detection side{{116, 100, 32, 64}, 7.0, 1.0};
  EXPECT_EQ(suppress_enclosing({tight, side}, 0.8).size(), 2u);
}
