#include "teleop/overlay/sbs.hpp"

#include <cstring>

namespace teleop::overlay {

SbsFrame to_half_sbs(const vision::RgbImage& src) {
  if (src.width() != kFrameWidth || src.height() != kFrameHeight)
    throw InvalidInput("half-SBS conversion expects a 1900x1000 frame");
  SbsFrame out{vision::RgbImage(kFrameWidth, kFrameHeight)};
  const std::size_t half_bytes = static_cast<std::size_t>(kEyeWidth) * 3;
  for (int y = 0; y < kFrameHeight; ++y) {
    const std::uint8_t* in = src.pixel(0, y);
    std::uint8_t* left = out.image.pixel(0, y);
    for (std::size_t i = 0; i < half_bytes; i += 3) {
      const std::uint8_t* a = in + 2 * i;
      left[i] = static_cast<std::uint8_t>((a[0] + a[3] + 1) >> 1);
      left[i + 1] = static_cast<std::uint8_t>((a[1] + a[4] + 1) >> 1);
      left[i + 2] = static_cast<std::uint8_t>((a[2] + a[5] + 1) >> 1);
    }
    std::memcpy(left + half_bytes, left, half_bytes);
  }
  return out;
}

SbsFrame to_half_sbs(const AnnotatedFrame& frame) {
  SbsFrame out = to_half_sbs(frame.image);
  out.frame_seq = frame.frame_seq;
  out.timestamp_us = frame.timestamp_us;
  return out;
}

}  // namespace teleop::overlay
