#include "teleop/vision/image.hpp"

namespace teleop::vision {

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

GrayImage to_luma(const RgbImage& rgb) {
  GrayImage out(rgb.width(), rgb.height());
  const std::uint8_t* src = rgb.data().data();
  std::uint8_t* dst = out.data().data();
  const std::size_t n = static_cast<std::size_t>(rgb.width()) * rgb.height();
  for (std::size_t i = 0; i < n; ++i, src += 3) {
    dst[i] = static_cast<std::uint8_t>((299u * src[0] + 587u * src[1] + 114u * src[2] + 500u) / 1000u);
  }
  return out;
}

GrayImage crop(const GrayImage& img, const Rect& r) {
  if (r.w < 1 || r.h < 1 || !r.inside(img.width(), img.height()))
    throw BoundsError("crop rectangle outside image");
  GrayImage out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    const std::uint8_t* src = img.pixel(r.x, r.y + y);
    std::copy(src, src + r.w, out.pixel(0, y));
  }
  return out;
}

}  // namespace teleop::vision
