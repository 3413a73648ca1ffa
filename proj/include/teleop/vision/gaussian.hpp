#pragma once

#include <vector>

#include "teleop/vision/image.hpp"

namespace teleop::vision {

/// Parameters of the sampled 2D Gaussian. Side length of the kernel is 2*radius+1.
struct GaussianKernelParams {
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double mu_x = 0.0;
  double mu_y = 0.0;
  int radius = 2;

  void validate() const;
};

/// Square kernel; `at(dx, dy)` for dx, dy in [-radius, radius].
struct Kernel2D {
  int radius = 0;
  std::vector<double> weights;  // row-major, (2r+1)^2

  int side() const { return 2 * radius + 1; }
  double at(int dx, int dy) const { return weights[(dy + radius) * side() + (dx + radius)]; }
};

/// Evaluates exp(-(x-mu_x)^2 / 2 sigma_x^2 - (y-mu_y)^2 / 2 sigma_y^2) on the
/// integer grid and normalizes the entries to sum to 1. The analytic prefactor
/// cancels in the normalization and is not applied.
Kernel2D gaussian_kernel(const GaussianKernelParams& params);

/// One axis of the separable kernel, normalized to sum to 1.
std::vector<double> gaussian_kernel_1d(double sigma, double mu, int radius);

/// Separable Gaussian smoothing (row pass then column pass) with
/// clamp-to-edge borders. Output rounded half away from zero.
GrayImage gaussian_blur(const GrayImage& img, const GaussianKernelParams& params);

}  // namespace teleop::vision
