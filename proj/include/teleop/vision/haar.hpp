#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "teleop/vision/image.hpp"
#include "teleop/vision/integral.hpp"

namespace teleop::vision {

struct WeightedRect {
  Rect rect;  // window-relative
  double weight = 0.0;
};

/// Weighted sum of rectangle sums inside a detection window.
struct HaarFeature {
  std::vector<WeightedRect> rects;
  int window_w = 0;
  int window_h = 0;

  /// Every rect inside the window, at least two rects, weights of mixed sign.
  void validate() const;
};

/// Depth-1 decision stump over one feature.
struct WeakClassifier {
  HaarFeature feature;
  double split_threshold = 0.0;
  double left_value = 0.0;   // feature < split
  double right_value = 0.0;  // feature >= split
};

struct CascadeStage {
  double threshold = 0.0;
  std::vector<WeakClassifier> weak_classifiers;
};

struct CascadeModel {
  int window_w = 0;
  int window_h = 0;
  std::vector<CascadeStage> stages;

  void validate() const;
};

struct CascadeResult {
  bool accepted = false;
  int stages_evaluated = 0;
  /// Sum of (stage score - stage threshold) over evaluated stages; used to rank windows.
  double margin = 0.0;
};

/// Window rectangle `r` scaled by `scale` (rounded) and offset by `origin`.
Rect scale_rect(const Rect& r, Point origin, double scale);

/// Sum over rects of weight * rect_sum(scaled rect). Throws BoundsError when a
/// scaled rect leaves the image.
double haar_feature_value(const IntegralImage& ii, const HaarFeature& f, Point window_origin, double scale);

/// Runs stages in order with early rejection. Stump splits are compared
/// against split_threshold * scale^2. Throws InvalidParameter for an empty cascade.
CascadeResult evaluate_cascade(const IntegralImage& ii, const CascadeModel& model, Point window_origin,
                               double scale);

// Text format:
//   cascade v1 <win_w> <win_h> <n_stages>
//   stage <threshold> <n_weak>
//   weak <split_threshold> <left_value> <right_value> <n_rects>
//   rect <x> <y> <w> <h> <weight>
CascadeModel parse_cascade(std::istream& in, const std::string& source = "<cascade>");
CascadeModel load_cascade(const std::string& path);
void write_cascade(std::ostream& out, const CascadeModel& model);

}  // namespace teleop::vision
