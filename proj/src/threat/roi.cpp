#include "teleop/threat/roi.hpp"

#include "teleop/vision/resize.hpp"

namespace teleop::threat {

RoiImage extract_and_resize(const vision::GrayImage& frame, const vision::Rect& bbox) {
  if (bbox.w < 1 || bbox.h < 1 || !bbox.inside(frame.width(), frame.height()))
    throw BoundsError("ROI bounding box outside frame");
  return {vision::resize_bilinear(vision::crop(frame, bbox), kRoiSize, kRoiSize), bbox};
}

}  // namespace teleop::threat
