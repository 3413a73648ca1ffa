#pragma once

#include <cstdint>
#include <vector>

#include "teleop/robot/corpus.hpp"
#include "teleop/training/fit.hpp"
#include "teleop/vision/gaussian.hpp"
#include "teleop/vision/hog.hpp"

namespace teleop::training {

struct LabeledSet {
  Matrix x;
  std::vector<int> y;
};

/// Reference-classifier features for every ROI.
LabeledSet corpus_features(const std::vector<robot::LabeledRoi>& corpus);

/// Detector training windows: people framed the way a detector window sees
/// them (label +1) and background, off-centre and wrong-scale crops (label -1),
/// each box-downscaled to the window size and blurred with `blur`.
LabeledSet person_windows(std::uint64_t seed, std::size_t positives, std::size_t negatives,
                          const vision::HogParams& params, const vision::GaussianKernelParams& blur);

/// The same windows as grey images, for detectors that are not HOG based.
struct WindowSet {
  std::vector<vision::GrayImage> windows;
  std::vector<int> y;
};
WindowSet person_window_images(std::uint64_t seed, std::size_t positives, std::size_t negatives, int window_w,
                               int window_h, const vision::GaussianKernelParams& blur);

}  // namespace teleop::training
