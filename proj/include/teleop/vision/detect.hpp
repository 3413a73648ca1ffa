#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "teleop/vision/haar.hpp"
#include "teleop/vision/hog.hpp"
#include "teleop/vision/image.hpp"

namespace teleop::vision {

struct Detection {
  Rect bbox;  // full-frame pixels
  double person_score = 0.0;
  double scale = 1.0;  // pyramid level scale relative to the input image
};

struct PyramidParams {
  double scale_factor = 1.2;
  /// Smallest object size searched, in input-image pixels. 0 = detector window.
  int min_window_w = 0;
  int min_window_h = 0;
  int stride = 8;  // level pixels
  int max_levels = 64;

  void validate() const;
};

struct HogSvmDetector {
  HogParams params;
  LinearSvmModel model;
};

using DetectorModel = std::variant<CascadeModel, HogSvmDetector>;

struct PyramidLevel {
  GrayImage image;
  double scale_x = 1.0;  // input width / level width
  double scale_y = 1.0;
};

/// Level 0 is the input; each further level is the previous one box-downscaled
/// by `scale_factor`, stopping once a level can no longer hold the window.
std::vector<PyramidLevel> build_pyramid(const GrayImage& img, double scale_factor, int window_w, int window_h,
                                        int max_levels = 64);

struct DetectionStats {
  std::size_t windows_evaluated = 0;
  int levels = 0;
};

/// Multi-scale sliding-window detection. Accepted windows are mapped back to
/// input coordinates, ordered by level then row-major window position. An
/// image smaller than the minimum window yields no detections.
std::vector<Detection> sliding_window_detect(const GrayImage& img, const DetectorModel& detector,
                                             const PyramidParams& pyramid, DetectionStats* stats = nullptr);

double iou(const Rect& a, const Rect& b);

/// Greedy NMS: visit by (score desc, x asc, y asc) and keep a detection iff its
/// IoU with every kept detection is <= iou_threshold.
std::vector<Detection> non_max_suppression(std::vector<Detection> dets, double iou_threshold);

/// Intersection area over the area of the smaller rect; 1 when one holds the other.
double overlap_of_smaller(const Rect& a, const Rect& b);

/// Same visiting order as non_max_suppression, but a detection is dropped when
/// more than `overlap_threshold` of the smaller of it and a kept detection lies
/// in both. Catches a loose large-scale window around a tight one, whose IoU
/// stays low because of the area ratio. A threshold of 1 keeps everything.
std::vector<Detection> suppress_enclosing(std::vector<Detection> dets, double overlap_threshold);

}  // namespace teleop::vision
