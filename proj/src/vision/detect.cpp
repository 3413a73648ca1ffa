#include "teleop/vision/detect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "teleop/vision/integral.hpp"
#include "teleop/vision/resize.hpp"

namespace teleop::vision {

void PyramidParams::validate() const {
  if (!(scale_factor > 1.0)) throw InvalidParameter("pyramid scale factor must be > 1");
  if (stride < 1) throw InvalidParameter("pyramid stride must be >= 1");
  if (min_window_w < 0 || min_window_h < 0) throw InvalidParameter("minimum window must be >= 0");
  if (max_levels < 1) throw InvalidParameter("pyramid needs at least one level");
}

std::vector<PyramidLevel> build_pyramid(const GrayImage& img, double scale_factor, int window_w, int window_h,
                                        int max_levels) {
  std::vector<PyramidLevel> levels;
  if (img.width() < window_w || img.height() < window_h) return levels;
  levels.push_back({img, 1.0, 1.0});
  while (static_cast<int>(levels.size()) < max_levels) {
    const GrayImage& prev = levels.back().image;
    const int w = static_cast<int>(std::floor(prev.width() / scale_factor));
    const int h = static_cast<int>(std::floor(prev.height() / scale_factor));
    if (w < window_w || h < window_h) break;
    GrayImage next = resize_area(prev, w, h);
    levels.push_back({std::move(next), static_cast<double>(img.width()) / w, static_cast<double>(img.height()) / h});
  }
  return levels;
}

namespace {

Rect to_input_rect(int x, int y, int w, int h, const PyramidLevel& lvl, int img_w, int img_h) {
  Rect r{static_cast<int>(std::lround(x * lvl.scale_x)), static_cast<int>(std::lround(y * lvl.scale_y)),
         static_cast<int>(std::lround(w * lvl.scale_x)), static_cast<int>(std::lround(h * lvl.scale_y))};
  r.x = std::clamp(r.x, 0, img_w - 1);
  r.y = std::clamp(r.y, 0, img_h - 1);
  r.w = std::clamp(r.w, 1, img_w - r.x);
  r.h = std::clamp(r.h, 1, img_h - r.y);
  return r;
}

struct WindowSize {
  int w, h;
};

WindowSize window_of(const DetectorModel& d) {
  if (const auto* c = std::get_if<CascadeModel>(&d)) return {c->window_w, c->window_h};
  const auto& h = std::get<HogSvmDetector>(d);
  return {h.params.window_w, h.params.window_h};
}

}  // namespace

std::vector<Detection> sliding_window_detect(const GrayImage& img, const DetectorModel& detector,
                                             const PyramidParams& pyramid, DetectionStats* stats) {
  pyramid.validate();
  if (const auto* c = std::get_if<CascadeModel>(&detector)) c->validate();
  if (const auto* h = std::get_if<HogSvmDetector>(&detector)) {
    h->params.validate();
    if (static_cast<int>(h->model.weights.size()) != h->params.descriptor_length())
      throw InvalidParameter("SVM weights do not match HOG descriptor length");
  }

  const WindowSize win = window_of(detector);
  const int min_w = std::max(pyramid.min_window_w, win.w);
  const int min_h = std::max(pyramid.min_window_h, win.h);
  DetectionStats local;
  DetectionStats& st = stats ? *stats : local;
  st = {};
  std::vector<Detection> out;
  if (img.width() < min_w || img.height() < min_h) return out;

  const auto levels = build_pyramid(img, pyramid.scale_factor, win.w, win.h, pyramid.max_levels);
  for (const auto& lvl : levels) {
    if (win.w * lvl.scale_x + 1e-9 < pyramid.min_window_w || win.h * lvl.scale_y + 1e-9 < pyramid.min_window_h)
      continue;
    ++st.levels;
    const GrayImage& li = lvl.image;
    const int max_x = li.width() - win.w;
    const int max_y = li.height() - win.h;

    if (const auto* cascade = std::get_if<CascadeModel>(&detector)) {
      const IntegralImage ii(li);
      for (int y = 0; y <= max_y; y += pyramid.stride) {
        for (int x = 0; x <= max_x; x += pyramid.stride) {
          ++st.windows_evaluated;
          const CascadeResult r = evaluate_cascade(ii, *cascade, {x, y}, 1.0);
          if (r.accepted)
            out.push_back({to_input_rect(x, y, win.w, win.h, lvl, img.width(), img.height()), r.margin, lvl.scale_x});
        }
      }
    } else {
      const auto& hog = std::get<HogSvmDetector>(detector);
      const int cell = hog.params.cell;
      if (pyramid.stride % cell == 0) {
        const HogGrid grid(li, hog.params);
        for (int y = 0; y <= max_y; y += pyramid.stride) {
          for (int x = 0; x <= max_x; x += pyramid.stride) {
            ++st.windows_evaluated;
            const double s = grid.dot_at(x / cell, y / cell, hog.model.weights) + hog.model.bias;
            if (svm_positive(s, hog.model))
              out.push_back({to_input_rect(x, y, win.w, win.h, lvl, img.width(), img.height()), s, lvl.scale_x});
          }
        }
      } else {
        for (int y = 0; y <= max_y; y += pyramid.stride) {
          for (int x = 0; x <= max_x; x += pyramid.stride) {
            ++st.windows_evaluated;
            const auto d = hog_descriptor(crop(li, {x, y, win.w, win.h}), hog.params);
            const double s = svm_score(d, hog.model);
            if (svm_positive(s, hog.model))
              out.push_back({to_input_rect(x, y, win.w, win.h, lvl, img.width(), img.height()), s, lvl.scale_x});
          }
        }
      }
    }
  }
  return out;
}

namespace {

long long intersection_area(const Rect& a, const Rect& b) {
  const long long ix = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const long long iy = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  return ix * iy;
}

}  // namespace

double iou(const Rect& a, const Rect& b) {
  const long long inter = intersection_area(a, b);
  const long long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

double overlap_of_smaller(const Rect& a, const Rect& b) {
  const long long smaller = std::min(a.area(), b.area());
  return smaller > 0 ? static_cast<double>(intersection_area(a, b)) / static_cast<double>(smaller) : 0.0;
}

std::vector<Detection> non_max_suppression(std::vector<Detection> dets, double iou_threshold) {
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    if (a.person_score != b.person_score) return a.person_score > b.person_score;
    if (a.bbox.x != b.bbox.x) return a.bbox.x < b.bbox.x;
    return a.bbox.y < b.bbox.y;
  });
  std::vector<Detection> kept;
  for (const auto& d : dets) {
    const bool overlaps =
        std::any_of(kept.begin(), kept.end(), [&](const Detection& k) { return iou(k.bbox, d.bbox) > iou_threshold; });
    if (!overlaps) kept.push_back(d);
  }
  return kept;
}

std::vector<Detection> suppress_enclosing(std::vector<Detection> dets, double overlap_threshold) {
  dets = non_max_suppression(std::move(dets), 1.0);  // ordering only
  std::vector<Detection> kept;
  for (const auto& d : dets) {
    const bool nested = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return overlap_of_smaller(k.bbox, d.bbox) > overlap_threshold;
    });
    if (!nested) kept.push_back(d);
  }
  return kept;
}

}  // namespace teleop::vision
