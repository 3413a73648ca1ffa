#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

using namespace teleop::vision;

GrayImage random_gray(std::mt19937_64& rng, int w, int h) {
  GrayImage img(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

RgbImage random_rgb(std::mt19937_64& rng, int w, int h) {
  RgbImage img(w, h);
  for (auto& v : img.data()) v = static_cast<std::uint8_t>(rng() & 0xFF);
  return img;
}

Rect random_rect(std::mt19937_64& rng, int w, int h) {
  const int x0 = static_cast<int>(rng() % (w + 1)), x1 = static_cast<int>(rng() % (w + 1));
  const int y0 = static_cast<int>(rng() % (h + 1)), y1 = static_cast<int>(rng() % (h + 1));
  return {std::min(x0, x1), std::min(y0, y1), std::abs(x1 - x0), std::abs(y1 - y0)};
}

std::uint64_t rect_sum(const GrayImage& img, const Rect& r) {
  std::uint64_t s = 0;
  for (int y = r.y; y < r.y + r.h; ++y)
    for (int x = r.x; x < r.x + r.w; ++x) s += img.at(x, y);
  return s;
}

static Rect scaled(const Rect& r, int ox, int oy, double scale) {
  auto q = [&](int v) { return static_cast<int>(std::floor(v * scale + 0.5)); };
  return {ox + q(r.x), oy + q(r.y), q(r.w), q(r.h)};
}

double haar_value(const GrayImage& img, const HaarFeature& f, int ox, int oy, double scale) {
  double v = 0;
  for (const auto& wr : f.rects) v += wr.weight * static_cast<double>(rect_sum(img, scaled(wr.rect, ox, oy, scale)));
  return v;
}

bool cascade_accepts(const GrayImage& img, const CascadeModel& m, int ox, int oy, double scale) {
  bool all = true;
  for (const auto& st : m.stages) {
    double score = 0;
    for (const auto& wc : st.weak_classifiers)
      score += haar_value(img, wc.feature, ox, oy, scale) < wc.split_threshold * scale * scale ? wc.left_value
                                                                                               : wc.right_value;
    all = all && score >= st.threshold;
  }
  return all;
}

double iou(const Rect& a, const Rect& b) {
  long long inter = 0;
  for (int y = std::max(a.y, b.y); y < std::min(a.y + a.h, b.y + b.h); ++y)
    inter += std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const long long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / uni : 0.0;
}

std::vector<Detection> nms(std::vector<Detection> dets, double threshold) {
  std::vector<Detection> kept;
  std::vector<bool> used(dets.size(), false);
  for (std::size_t round = 0; round < dets.size(); ++round) {
    // Pick the best remaining candidate by scanning everything.
    std::size_t best = dets.size();
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (used[i]) continue;
      if (best == dets.size()) {
        best = i;
        continue;
      }
      const auto& a = dets[i];
      const auto& b = dets[best];
      if (a.person_score > b.person_score ||
          (a.person_score == b.person_score &&
           (a.bbox.x < b.bbox.x || (a.bbox.x == b.bbox.x && a.bbox.y < b.bbox.y))))
        best = i;
    }
    used[best] = true;
    bool keep = true;
    for (const auto& k : kept) keep = keep && oracle::iou(k.bbox, dets[best].bbox) <= threshold;
    if (keep) kept.push_back(dets[best]);
  }
  return kept;
}

std::vector<double> cell_histogram(const GrayImage& win, int cx, int cy, const HogParams& p) {
  std::vector<double> h(p.bins, 0.0);
  const double width = 180.0 / p.bins;
  auto px = [&](int x, int y) {
    x = std::clamp(x, 0, win.width() - 1);
    y = std::clamp(y, 0, win.height() - 1);
    return static_cast<double>(win.at(x, y));
  };
  for (int y = cy * p.cell; y < (cy + 1) * p.cell; ++y) {
    for (int x = cx * p.cell; x < (cx + 1) * p.cell; ++x) {
      const double gx = px(x + 1, y) - px(x - 1, y);
      const double gy = px(x, y + 1) - px(x, y - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0) continue;
      double deg = std::atan2(gy, gx) * 180.0 / M_PI;
      while (deg < 0) deg += 180.0;
      while (deg >= 180.0) deg -= 180.0;
      // Split the vote between the two bin centres b*width that bracket deg.
      for (int b = 0; b < p.bins; ++b) {
        double d = std::abs(deg - b * width);
        d = std::min(d, 180.0 - d);
        if (d < width) h[b] += mag * (1.0 - d / width);
      }
    }
  }
  return h;
}

std::vector<double> hog(const GrayImage& win, const HogParams& p) {
  std::vector<double> out;
  for (int by = 0; by + p.block <= p.cells_y(); by += p.block_stride) {
    for (int bx = 0; bx + p.block <= p.cells_x(); bx += p.block_stride) {
      std::vector<double> v;
      for (int j = 0; j < p.block; ++j)
        for (int i = 0; i < p.block; ++i) {
          auto c = cell_histogram(win, bx + i, by + j, p);
          v.insert(v.end(), c.begin(), c.end());
        }
      for (int pass = 0; pass < 2; ++pass) {
        double n = p.epsilon * p.epsilon;
        for (double x : v) n += x * x;
        n = std::sqrt(n);
        for (double& x : v) x = pass == 0 ? std::min(x / n, p.clip) : x / n;
      }
      out.insert(out.end(), v.begin(), v.end());
    }
  }
  return out;
}

std::vector<double> gaussian_weights(const GaussianKernelParams& p) {
  const int r = p.radius, side = 2 * r + 1;
  std::vector<double> k(side * side);
  double total = 0;
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x) {
      const double v = std::exp(-((x - p.mu_x) * (x - p.mu_x) / (2 * p.sigma_x * p.sigma_x) +
                                  (y - p.mu_y) * (y - p.mu_y) / (2 * p.sigma_y * p.sigma_y)));
      k[(y + r) * side + (x + r)] = v;
      total += v;
    }
  for (double& v : k) v /= total;
  return k;
}

GrayImage blur_direct(const GrayImage& img, const GaussianKernelParams& p) {
  const auto k = gaussian_weights(p);
  const int r = p.radius, side = 2 * r + 1;
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      double acc = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
          acc += k[(dy + r) * side + (dx + r)] *
                 img.at(std::clamp(x + dx, 0, img.width() - 1), std::clamp(y + dy, 0, img.height() - 1));
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(acc + 0.5), 0.0, 255.0));
    }
  return out;
}

RgbImage half_sbs(const RgbImage& img) {
  RgbImage out(img.width(), img.height());
  const int half = img.width() / 2;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < half; ++x)
      for (int c = 0; c < 3; ++c) {
        const int sum = img.at(2 * x, y, c) + img.at(2 * x + 1, y, c);
        const auto v = static_cast<std::uint8_t>(sum / 2 + sum % 2);  // half up
        out.at(x, y, c) = v;
        out.at(x + half, y, c) = v;
      }
  return out;
}

GrayImage bilinear(const GrayImage& src, int w, int h) {
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double sx = std::clamp((x + 0.5) * src.width() / w - 0.5, 0.0, src.width() - 1.0);
      const double sy = std::clamp((y + 0.5) * src.height() / h - 0.5, 0.0, src.height() - 1.0);
      const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
      const int x1 = std::min(x0 + 1, src.width() - 1), y1 = std::min(y0 + 1, src.height() - 1);
      const double fx = sx - x0, fy = sy - y0;
      const double v = (1 - fx) * (1 - fy) * src.at(x0, y0) + fx * (1 - fy) * src.at(x1, y0) +
                       (1 - fx) * fy * src.at(x0, y1) + fx * fy * src.at(x1, y1);
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  return out;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (auto b : bytes) {
    c ^= b;
    for (int i = 0; i < 8; ++i) c = (c & 1) ? (c >> 1) ^ 0xEDB88320u : c >> 1;
  }
  return ~c;
}

double ema_alternating_gain(double alpha, int samples) {
  double y = 0, peak = 0;
  for (int n = 0; n < samples; ++n) {
    const double x = n % 2 ? -1.0 : 1.0;
    y += alpha * (x - y);
    if (n > samples / 2) peak = std::max(peak, std::abs(y));
  }
  return peak;
}

}  // namespace oracle
