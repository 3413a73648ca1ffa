#include "teleop/vision/resize.hpp"

#include <algorithm>
#include <cmath>

namespace teleop::vision {

namespace {

struct Tap {
  int index;
  float weight;
};

// For every destination index, the source samples it covers and their
// fractional coverage, normalized so the weights of one output sum to 1.
struct AreaTable {
  std::vector<int> begin;  // size dst + 1, offsets into taps
  std::vector<Tap> taps;
};

AreaTable area_table(int src, int dst) {
  AreaTable t;
  t.begin.reserve(dst + 1);
  const double ratio = static_cast<double>(src) / dst;
  for (int o = 0; o < dst; ++o) {
    t.begin.push_back(static_cast<int>(t.taps.size()));
    const double lo = o * ratio;
    const double hi = std::min<double>((o + 1) * ratio, src);
    int i = static_cast<int>(std::floor(lo));
    for (; i < src && i < hi; ++i) {
      const double cover = std::min<double>(i + 1, hi) - std::max<double>(i, lo);
      if (cover > 1e-12) t.taps.push_back({i, static_cast<float>(cover / (hi - lo))});
    }
  }
  t.begin.push_back(static_cast<int>(t.taps.size()));
  return t;
}

}  // namespace

GrayImage resize_area(const GrayImage& src, int width, int height) {
  if (width < 1 || height < 1) throw InvalidParameter("resize target must be >= 1x1");
  if (width == src.width() && height == src.height()) return src;

  const AreaTable cols = area_table(src.width(), width);
  const AreaTable rows = area_table(src.height(), height);

  std::vector<float> tmp(static_cast<std::size_t>(src.height()) * width);
  for (int y = 0; y < src.height(); ++y) {
    const std::uint8_t* in = src.pixel(0, y);
    float* out = tmp.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      float acc = 0.f;
      for (int k = cols.begin[x]; k < cols.begin[x + 1]; ++k) acc += cols.taps[k].weight * in[cols.taps[k].index];
      out[x] = acc;
    }
  }

  GrayImage dst(width, height);
  std::vector<float> acc(width);
  for (int y = 0; y < height; ++y) {
    std::fill(acc.begin(), acc.end(), 0.f);
    for (int k = rows.begin[y]; k < rows.begin[y + 1]; ++k) {
      const float w = rows.taps[k].weight;
      const float* in = tmp.data() + static_cast<std::size_t>(rows.taps[k].index) * width;
      for (int x = 0; x < width; ++x) acc[x] += w * in[x];
    }
    std::uint8_t* out = dst.pixel(0, y);
    for (int x = 0; x < width; ++x) out[x] = round_to_u8(acc[x]);
  }
  return dst;
}

GrayImage resize_bilinear(const GrayImage& src, int width, int height) {
  if (width < 1 || height < 1) throw InvalidParameter("resize target must be >= 1x1");
  if (width == src.width() && height == src.height()) return src;

  auto axis = [](int s, int d, std::vector<int>& i0, std::vector<int>& i1, std::vector<double>& f) {
    const double ratio = static_cast<double>(s) / d;
    i0.resize(d);
    i1.resize(d);
    f.resize(d);
    for (int o = 0; o < d; ++o) {
      double p = (o + 0.5) * ratio - 0.5;
      p = std::clamp(p, 0.0, static_cast<double>(s - 1));
      const int a = static_cast<int>(std::floor(p));
      i0[o] = a;
      i1[o] = std::min(a + 1, s - 1);
      f[o] = p - a;
    }
  };
  std::vector<int> x0, x1, y0, y1;
  std::vector<double> fx, fy;
  axis(src.width(), width, x0, x1, fx);
  axis(src.height(), height, y0, y1, fy);

  GrayImage dst(width, height);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* r0 = src.pixel(0, y0[y]);
    const std::uint8_t* r1 = src.pixel(0, y1[y]);
    for (int x = 0; x < width; ++x) {
      const double top = r0[x0[x]] + fx[x] * (r0[x1[x]] - r0[x0[x]]);
      const double bot = r1[x0[x]] + fx[x] * (r1[x1[x]] - r1[x0[x]]);
      dst.at(x, y) = round_to_u8(top + fy[y] * (bot - top));
    }
  }
  return dst;
}

}  // namespace teleop::vision
