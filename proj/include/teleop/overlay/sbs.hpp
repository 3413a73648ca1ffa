#pragma once

#include "teleop/overlay/annotate.hpp"

namespace teleop::overlay {

inline constexpr int kEyeWidth = kFrameWidth / 2;  // 950

/// Half side-by-side frame: two identical 950x1000 halves in a 1900x1000 raster.
struct SbsFrame {
  vision::RgbImage image;
  std::uint32_t frame_seq = 0;
  std::uint64_t timestamp_us = 0;
};

/// Horizontal 2:1 decimation by pair averaging ((a + b + 1) / 2 per channel),
/// duplicated into both halves. Throws InvalidInput unless the frame is 1900x1000.
SbsFrame to_half_sbs(const AnnotatedFrame& frame);
SbsFrame to_half_sbs(const vision::RgbImage& image);

}  // namespace teleop::overlay
