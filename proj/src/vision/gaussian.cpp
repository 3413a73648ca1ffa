#include "teleop/vision/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace teleop::vision {

void GaussianKernelParams::validate() const {
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) throw InvalidParameter("gaussian sigma must be > 0");
  if (radius < 0) throw InvalidParameter("gaussian radius must be >= 0");
  if (!std::isfinite(mu_x) || !std::isfinite(mu_y)) throw InvalidParameter("gaussian mean must be finite");
}

Kernel2D gaussian_kernel(const GaussianKernelParams& p) {
  p.validate();
  Kernel2D k;
  k.radius = p.radius;
  const int side = k.side();
  k.weights.resize(static_cast<std::size_t>(side) * side);
  double sum = 0.0;
  for (int dy = -p.radius; dy <= p.radius; ++dy) {
    for (int dx = -p.radius; dx <= p.radius; ++dx) {
      const double ex = (dx - p.mu_x) * (dx - p.mu_x) / (2.0 * p.sigma_x * p.sigma_x);
      const double ey = (dy - p.mu_y) * (dy - p.mu_y) / (2.0 * p.sigma_y * p.sigma_y);
      const double v = std::exp(-ex - ey);
      k.weights[(dy + p.radius) * side + (dx + p.radius)] = v;
      sum += v;
    }
  }
  for (double& w : k.weights) w /= sum;
  return k;
}

std::vector<double> gaussian_kernel_1d(double sigma, double mu, int radius) {
  if (!(sigma > 0.0)) throw InvalidParameter("gaussian sigma must be > 0");
  if (radius < 0) throw InvalidParameter("gaussian radius must be >= 0");
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(i - mu) * (i - mu) / (2.0 * sigma * sigma));
    k[i + radius] = v;
    sum += v;
  }
  for (double& w : k) w /= sum;
  return k;
}

GrayImage gaussian_blur(const GrayImage& img, const GaussianKernelParams& p) {
  p.validate();
  const int w = img.width();
  const int h = img.height();
  const int r = p.radius;
  if (r == 0) return img;

  std::vector<float> kx, ky;
  for (double v : gaussian_kernel_1d(p.sigma_x, p.mu_x, r)) kx.push_back(static_cast<float>(v));
  for (double v : gaussian_kernel_1d(p.sigma_y, p.mu_y, r)) ky.push_back(static_cast<float>(v));

  // Row pass on a clamp-padded copy of each row.
  std::vector<float> tmp(static_cast<std::size_t>(w) * h);
  std::vector<float> padded(w + 2 * r);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* in = img.pixel(0, y);
    for (int i = 0; i < w + 2 * r; ++i) padded[i] = in[std::clamp(i - r, 0, w - 1)];
    float* out = tmp.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      float acc = 0.f;
      for (int k = 0; k <= 2 * r; ++k) acc += kx[k] * padded[x + k];
      out[x] = acc;
    }
  }

  GrayImage out(w, h);
  std::vector<float> acc(w);
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.f);
    for (int k = 0; k <= 2 * r; ++k) {
      const int sy = std::clamp(y + k - r, 0, h - 1);
      const float wk = ky[k];
      const float* in = tmp.data() + static_cast<std::size_t>(sy) * w;
      for (int x = 0; x < w; ++x) acc[x] += wk * in[x];
    }
    std::uint8_t* dst = out.pixel(0, y);
    for (int x = 0; x < w; ++x) dst[x] = round_to_u8(acc[x]);
  }
  return out;
}

}  // namespace teleop::vision
