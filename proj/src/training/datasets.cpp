#include "teleop/training/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "teleop/robot/render.hpp"
#include "teleop/threat/reference_classifier.hpp"
#include "teleop/vision/resize.hpp"

namespace teleop::training {

LabeledSet corpus_features(const std::vector<robot::LabeledRoi>& corpus) {
  LabeledSet s;
  s.x.reserve(corpus.size());
  for (const auto& r : corpus) {
    s.x.push_back(threat::reference_features(r.roi.image));
    s.y.push_back(r.label);
  }
  return s;
}

namespace {

// A person fills this fraction of the window height when framed as a positive.
constexpr double kPersonFill = 0.8;

vision::GrayImage window_from(const robot::Scene& scene, double cx, double cy, double win_h, int window_w,
                              int window_h, const vision::GaussianKernelParams& blur) {
  const double win_w = win_h * window_w / window_h;
  vision::Rect r{static_cast<int>(std::lround(cx - win_w / 2)), static_cast<int>(std::lround(cy - win_h / 2)),
                 static_cast<int>(std::lround(win_w)), static_cast<int>(std::lround(win_h))};
  r.w = std::clamp(r.w, window_w, robot::kFrameWidth);
  r.h = std::clamp(r.h, window_h, robot::kFrameHeight);
  r.x = std::clamp(r.x, 0, robot::kFrameWidth - r.w);
  r.y = std::clamp(r.y, 0, robot::kFrameHeight - r.h);
  const auto luma = vision::to_luma(robot::render_region(scene, robot::CameraState{}, r));
  return vision::gaussian_blur(vision::resize_area(luma, window_w, window_h), blur);
}

}  // namespace

WindowSet person_window_images(std::uint64_t seed, std::size_t positives, std::size_t negatives, int window_w,
                               int window_h, const vision::GaussianKernelParams& blur) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sym = [&](double a) { return (2 * unit(rng) - 1) * a; };
  auto person_scene = [&](robot::Scene& s) {
    s.seed = rng();
    robot::Entity e;
    e.id = 1;
    e.x = 4.0 + 12.0 * unit(rng);
    e.y = sym(0.3 * e.x);
    e.weapon = static_cast<int>(rng() % 8);
    e.facing = unit(rng) < 0.5 ? robot::Facing::kLeft : robot::Facing::kRight;
    s.entities.push_back(e);
    return robot::project_entities(s, robot::CameraState{}).at(0);
  };

  WindowSet out;
  for (std::size_t i = 0; i < positives; ++i) {
    robot::Scene s;
    const auto sp = person_scene(s);
    const double win_h = sp.height / kPersonFill * (1.0 + sym(0.08));
    out.windows.push_back(window_from(s, sp.center_x() + sym(0.04) * sp.width, sp.center_y() + sym(0.04) * sp.height,
                                      win_h, window_w, window_h, blur));
    out.y.push_back(1);
  }
  for (std::size_t i = 0; i < negatives; ++i) {
    robot::Scene s;
    const int kind = static_cast<int>(i % 3);
    if (kind == 0) {
      // Empty background anywhere in the frame.
      s.seed = rng();
      const double win_h = 60 + unit(rng) * 800;
      out.windows.push_back(window_from(s, unit(rng) * robot::kFrameWidth, unit(rng) * robot::kFrameHeight, win_h,
                                        window_w, window_h, blur));
    } else if (kind == 1) {
      // Person well off centre.
      const auto sp = person_scene(s);
      const double win_h = sp.height / kPersonFill;
      const double dx = (0.45 + 0.6 * unit(rng)) * (unit(rng) < 0.5 ? -1 : 1);
      const double dy = sym(0.6);
      out.windows.push_back(window_from(s, sp.center_x() + dx * win_h / 2, sp.center_y() + dy * win_h, win_h, window_w,
                                        window_h, blur));
    } else {
      // Person at the wrong scale: window much larger or much smaller than the person.
      const auto sp = person_scene(s);
      const double f = unit(rng) < 0.5 ? 0.4 + 0.25 * unit(rng) : 1.8 + 1.5 * unit(rng);
      const double win_h = sp.height / kPersonFill * f;
      out.windows.push_back(window_from(s, sp.center_x() + sym(0.2) * sp.width, sp.center_y() + sym(0.2) * sp.height,
                                        win_h, window_w, window_h, blur));
    }
    out.y.push_back(-1);
  }
  return out;
}

LabeledSet person_windows(std::uint64_t seed, std::size_t positives, std::size_t negatives,
                          const vision::HogParams& params, const vision::GaussianKernelParams& blur) {
  auto w = person_window_images(seed, positives, negatives, params.window_w, params.window_h, blur);
  LabeledSet s;
  s.y = std::move(w.y);
  for (const auto& img : w.windows) s.x.push_back(vision::hog_descriptor(img, params));
  return s;
}

}  // namespace teleop::training
