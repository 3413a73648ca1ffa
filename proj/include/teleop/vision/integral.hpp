#pragma once

#include <cstdint>
#include <vector>

#include "teleop/vision/image.hpp"

namespace teleop::vision {

/// (width+1) x (height+1) cumulative-sum table. Entry (x, y) is the sum of all
/// source pixels with coordinates strictly less than (x, y); row 0 and column 0 are zero.
class IntegralImage {
 public:
  IntegralImage() = default;
  explicit IntegralImage(const GrayImage& img);

  int width() const { return width_; }    // source width
  int height() const { return height_; }  // source height
  std::uint64_t at(int x, int y) const { return table_[static_cast<std::size_t>(y) * (width_ + 1) + x]; }

  /// Four-lookup sum; no bounds check.
  std::uint64_t sum_unchecked(int x, int y, int w, int h) const {
    const std::size_t s = width_ + 1;
    const std::uint64_t* t = table_.data();
    return t[(y + h) * s + (x + w)] - t[y * s + (x + w)] - t[(y + h) * s + x] + t[y * s + x];
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint64_t> table_;
};

IntegralImage integral_image(const GrayImage& img);

/// Exact rectangle sum. Zero-area rectangles sum to 0. Throws BoundsError when
/// the rectangle leaves the source image.
std::uint64_t rect_sum(const IntegralImage& ii, const Rect& r);

}  // namespace teleop::vision
