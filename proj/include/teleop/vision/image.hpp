#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "teleop/error.hpp"

namespace teleop::vision {

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long long area() const { return static_cast<long long>(w) * h; }
  bool contains(double px, double py) const { return px >= x && px < x + w && py >= y && py < y + h; }
  bool inside(int width, int height) const {
    return x >= 0 && y >= 0 && w >= 0 && h >= 0 && x + w <= width && y + h <= height;
  }
  bool operator==(const Rect&) const = default;
};

/// Row-major interleaved 8-bit raster with `Channels` samples per pixel.
template <int Channels>
class Raster {
 public:
  static constexpr int kChannels = Channels;

  Raster() = default;
  Raster(int width, int height, std::uint8_t fill = 0) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw InvalidParameter("raster dimensions must be >= 1");
    data_.assign(static_cast<std::size_t>(width) * height * Channels, fill);
  }
  Raster(int width, int height, std::vector<std::uint8_t> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) throw InvalidParameter("raster dimensions must be >= 1");
    if (data_.size() != static_cast<std::size_t>(width) * height * Channels)
      throw InvalidInput("raster data length does not match dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  std::size_t stride() const { return static_cast<std::size_t>(width_) * Channels; }

  std::uint8_t* pixel(int x, int y) { return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * Channels; }
  const std::uint8_t* pixel(int x, int y) const {
    return data_.data() + (static_cast<std::size_t>(y) * width_ + x) * Channels;
  }
  std::uint8_t& at(int x, int y, int c = 0) { return pixel(x, y)[c]; }
  std::uint8_t at(int x, int y, int c = 0) const { return pixel(x, y)[c]; }

  std::span<std::uint8_t> row(int y) { return {pixel(0, y), stride()}; }
  std::span<const std::uint8_t> row(int y) const { return {pixel(0, y), stride()}; }

  std::vector<std::uint8_t>& data() { return data_; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  bool operator==(const Raster&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

using GrayImage = Raster<1>;
using RgbImage = Raster<3>;

/// BT.601 luma, rounded to nearest: Y = (299 R + 587 G + 114 B + 500) / 1000.
GrayImage to_luma(const RgbImage& rgb);
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

GrayImage crop(const GrayImage& img, const Rect& r);

/// Rounds a non-negative intensity half away from zero and saturates to [0, 255].
inline std::uint8_t round_to_u8(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

}  // namespace teleop::vision
