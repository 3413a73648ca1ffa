#pragma once

// Slow, obvious reference implementations used to check the real code.
// None of these call into the functions they check.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "teleop/vision/detect.hpp"
#include "teleop/vision/gaussian.hpp"
#include "teleop/vision/haar.hpp"
#include "teleop/vision/hog.hpp"
#include "teleop/vision/image.hpp"

namespace oracle {

using teleop::vision::GrayImage;
using teleop::vision::Rect;
using teleop::vision::RgbImage;

GrayImage random_gray(std::mt19937_64& rng, int w, int h);
RgbImage random_rgb(std::mt19937_64& rng, int w, int h);
Rect random_rect(std::mt19937_64& rng, int w, int h);

std::uint64_t rect_sum(const GrayImage& img, const Rect& r);

double haar_value(const GrayImage& img, const teleop::vision::HaarFeature& f, int ox, int oy, double scale);
/// Runs every stage, no early exit.
bool cascade_accepts(const GrayImage& img, const teleop::vision::CascadeModel& m, int ox, int oy, double scale);

double iou(const Rect& a, const Rect& b);
std::vector<teleop::vision::Detection> nms(std::vector<teleop::vision::Detection> dets, double threshold);

/// Per-pixel gradients and votes, one cell at a time.
std::vector<double> cell_histogram(const GrayImage& window, int cx, int cy, const teleop::vision::HogParams& p);
std::vector<double> hog(const GrayImage& window, const teleop::vision::HogParams& p);

/// Direct (2r+1)^2 convolution with clamped borders, kernel from the exponent.
std::vector<double> gaussian_weights(const teleop::vision::GaussianKernelParams& p);
GrayImage blur_direct(const GrayImage& img, const teleop::vision::GaussianKernelParams& p);

RgbImage half_sbs(const RgbImage& img);

GrayImage bilinear(const GrayImage& src, int w, int h);

/// Bit-at-a-time reflected CRC-32.
std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Steady-state peak of an EMA driven by +a, -a, +a, ...
double ema_alternating_gain(double alpha, int samples);

}  // namespace oracle
