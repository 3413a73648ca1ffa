#include "teleop/vision/integral.hpp"

namespace teleop::vision {

IntegralImage::IntegralImage(const GrayImage& img) : width_(img.width()), height_(img.height()) {
  const std::size_t s = width_ + 1;
  table_.assign(s * (height_ + 1), 0);
  for (int y = 0; y < height_; ++y) {
    const std::uint8_t* in = img.pixel(0, y);
    std::uint64_t row = 0;
    std::uint64_t* above = table_.data() + y * s;
    std::uint64_t* cur = above + s;
    for (int x = 0; x < width_; ++x) {
      row += in[x];
      cur[x + 1] = above[x + 1] + row;
    }
  }
}

IntegralImage integral_image(const GrayImage& img) { return IntegralImage(img); }

std::uint64_t rect_sum(const IntegralImage& ii, const Rect& r) {
  if (!r.inside(ii.width(), ii.height())) throw BoundsError("rect_sum: rectangle outside image");
  if (r.w == 0 || r.h == 0) return 0;
  return ii.sum_unchecked(r.x, r.y, r.w, r.h);
}

}  // namespace teleop::vision
