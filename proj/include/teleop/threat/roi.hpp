#pragma once

#include "teleop/vision/image.hpp"

namespace teleop::threat {

inline constexpr int kRoiSize = 227;

struct RoiImage {
  vision::GrayImage image;  // always kRoiSize x kRoiSize
  vision::Rect source_bbox;
};

/// Crops `bbox` out of `frame` and bilinearly resizes it to 227x227.
/// Throws BoundsError when the box leaves the frame or is empty.
RoiImage extract_and_resize(const vision::GrayImage& frame, const vision::Rect& bbox);

}  // namespace teleop::threat
