#pragma once

#include "teleop/vision/image.hpp"

namespace teleop::vision {

/// Box-averaging (area) resampling. Each output pixel is the coverage-weighted
/// mean of the source area it maps onto; rounded half up. Used for every
/// downscale in the pipeline (pyramid levels, internal detection resolution).
GrayImage resize_area(const GrayImage& src, int width, int height);

/// Bilinear resampling with pixel-center alignment:
/// src = (dst + 0.5) * (src_size / dst_size) - 0.5, clamped to the border.
/// An equal-size resize is an exact copy.
GrayImage resize_bilinear(const GrayImage& src, int width, int height);

}  // namespace teleop::vision
