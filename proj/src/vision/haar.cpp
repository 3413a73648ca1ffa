#include "teleop/vision/haar.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "teleop/vision/text_format.hpp"

namespace teleop::vision {

void HaarFeature::validate() const {
  if (window_w < 1 || window_h < 1) throw InvalidParameter("haar feature window must be >= 1x1");
  if (rects.size() < 2) throw InvalidParameter("haar feature needs at least 2 rects");
  bool pos = false, neg = false;
  for (const auto& wr : rects) {
    if (wr.rect.w < 1 || wr.rect.h < 1 || !wr.rect.inside(window_w, window_h))
      throw InvalidParameter("haar rect outside its window");
    if (!std::isfinite(wr.weight)) throw InvalidParameter("haar weight must be finite");
    pos |= wr.weight > 0;
    neg |= wr.weight < 0;
  }
  if (!pos || !neg) throw InvalidParameter("haar feature weights must have mixed signs");
}

void CascadeModel::validate() const {
  if (stages.empty()) throw InvalidParameter("cascade has no stages");
  if (window_w < 1 || window_h < 1) throw InvalidParameter("cascade window must be >= 1x1");
  for (const auto& s : stages) {
    if (s.weak_classifiers.empty()) throw InvalidParameter("cascade stage has no weak classifiers");
    for (const auto& wc : s.weak_classifiers) {
      wc.feature.validate();
      if (wc.feature.window_w != window_w || wc.feature.window_h != window_h)
        throw InvalidParameter("haar feature window differs from cascade window");
    }
  }
}

Rect scale_rect(const Rect& r, Point origin, double scale) {
  if (scale == 1.0) return {origin.x + r.x, origin.y + r.y, r.w, r.h};
  return {origin.x + static_cast<int>(std::lround(r.x * scale)), origin.y + static_cast<int>(std::lround(r.y * scale)),
          static_cast<int>(std::lround(r.w * scale)), static_cast<int>(std::lround(r.h * scale))};
}

double haar_feature_value(const IntegralImage& ii, const HaarFeature& f, Point window_origin, double scale) {
  double value = 0.0;
  for (const auto& wr : f.rects) {
    const Rect r = scale_rect(wr.rect, window_origin, scale);
    if (!r.inside(ii.width(), ii.height())) throw BoundsError("haar rect outside image");
    value += wr.weight * static_cast<double>(ii.sum_unchecked(r.x, r.y, r.w, r.h));
  }
  return value;
}

CascadeResult evaluate_cascade(const IntegralImage& ii, const CascadeModel& model, Point window_origin,
                               double scale) {
  if (model.stages.empty()) throw InvalidParameter("cascade has no stages");
  const Rect window = scale_rect({0, 0, model.window_w, model.window_h}, window_origin, scale);
  if (!window.inside(ii.width(), ii.height())) throw BoundsError("cascade window outside image");

  const double area_scale = scale * scale;
  CascadeResult result;
  for (const auto& stage : model.stages) {
    ++result.stages_evaluated;
    double score = 0.0;
    for (const auto& wc : stage.weak_classifiers) {
      const double v = haar_feature_value(ii, wc.feature, window_origin, scale);
      score += v < wc.split_threshold * area_scale ? wc.left_value : wc.right_value;
    }
    if (score < stage.threshold) return result;
    // Vacuous thresholds (-inf) would poison the ranking margin.
    if (std::isfinite(stage.threshold)) result.margin += score - stage.threshold;
  }
  result.accepted = true;
  return result;
}

CascadeModel parse_cascade(std::istream& in, const std::string& source) {
  text::LineReader reader(in, source);
  auto header = reader.expect("cascade header");
  reader.require(header, 5, "cascade");
  if (header[1] != "v1") reader.fail("unsupported cascade version '" + header[1] + "'");
  CascadeModel model;
  model.window_w = static_cast<int>(reader.to_int(header[2]));
  model.window_h = static_cast<int>(reader.to_int(header[3]));
  const long long n_stages = reader.to_int(header[4]);
  if (model.window_w < 1 || model.window_h < 1) reader.fail("cascade window must be >= 1x1");
  if (n_stages < 1) reader.fail("cascade stage count must be >= 1");

  for (long long s = 0; s < n_stages; ++s) {
    auto st = reader.expect("stage record");
    reader.require(st, 3, "stage");
    CascadeStage stage;
    stage.threshold = reader.to_double(st[1]);
    const long long n_weak = reader.to_int(st[2]);
    if (n_weak < 1) reader.fail("stage weak-classifier count must be >= 1");
    for (long long k = 0; k < n_weak; ++k) {
      auto wk = reader.expect("weak record");
      reader.require(wk, 5, "weak");
      WeakClassifier wc;
      wc.split_threshold = reader.to_double(wk[1]);
      wc.left_value = reader.to_double(wk[2]);
      wc.right_value = reader.to_double(wk[3]);
      const long long n_rects = reader.to_int(wk[4]);
      if (n_rects < 2) reader.fail("feature rect count must be >= 2");
      wc.feature.window_w = model.window_w;
      wc.feature.window_h = model.window_h;
      for (long long r = 0; r < n_rects; ++r) {
        auto rc = reader.expect("rect record");
        reader.require(rc, 6, "rect");
        WeightedRect wr;
        wr.rect = {static_cast<int>(reader.to_int(rc[1])), static_cast<int>(reader.to_int(rc[2])),
                   static_cast<int>(reader.to_int(rc[3])), static_cast<int>(reader.to_int(rc[4]))};
        wr.weight = reader.to_double(rc[5]);
        wc.feature.rects.push_back(wr);
      }
      try {
        wc.feature.validate();
      } catch (const InvalidParameter& e) {
        reader.fail(e.what());
      }
      stage.weak_classifiers.push_back(std::move(wc));
    }
    model.stages.push_back(std::move(stage));
  }
  reader.expect_end();
  return model;
}

CascadeModel load_cascade(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open cascade model '" + path + "'");
  return parse_cascade(in, path);
}

void write_cascade(std::ostream& out, const CascadeModel& model) {
  out << "cascade v1 " << model.window_w << ' ' << model.window_h << ' ' << model.stages.size() << '\n';
  out << std::setprecision(17);
  for (const auto& s : model.stages) {
    out << "stage " << s.threshold << ' ' << s.weak_classifiers.size() << '\n';
    for (const auto& wc : s.weak_classifiers) {
      out << "weak " << wc.split_threshold << ' ' << wc.left_value << ' ' << wc.right_value << ' '
          << wc.feature.rects.size() << '\n';
      for (const auto& wr : wc.feature.rects)
        out << "rect " << wr.rect.x << ' ' << wr.rect.y << ' ' << wr.rect.w << ' ' << wr.rect.h << ' ' << wr.weight
            << '\n';
    }
  }
}

}  // namespace teleop::vision
