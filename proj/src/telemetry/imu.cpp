#include "teleop/telemetry/imu.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace teleop::telemetry {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;
}  // namespace

double normalize_yaw(double a) {
  a = std::fmod(a, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

double shortest_arc(double from, double to) { return normalize_yaw(to - from); }

double pitch_from_accel(const Vec3& a) {
  const double mag = std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
  if (!std::isfinite(mag) || mag <= kMinAccelMagnitude) throw UnreliableSample("accelerometer magnitude below 0.5 g");
  return std::atan2(-a.x, std::sqrt(a.y * a.y + a.z * a.z)) * kRadToDeg;
}

double yaw_from_mag(const Vec3& m) {
  const double horizontal = std::hypot(m.x, m.y);
  if (!std::isfinite(horizontal) || horizontal <= kMinHorizontalField)
    throw UnreliableSample("horizontal magnetic field too weak");
  return normalize_yaw(std::atan2(-m.y, m.x) * kRadToDeg);
}

HeadPose pose_from_sample(const ImuSample& s) {
  return {pitch_from_accel(s.accel), yaw_from_mag(s.mag), s.timestamp_us};
}

HeadPose CalibrationOffsets::apply(const HeadPose& p) const {
  return {std::clamp(p.pitch - pitch, -90.0, 90.0), normalize_yaw(p.yaw - yaw), p.timestamp_us};
}

CalibrationOffsets calibrate(std::span<const ImuSample> samples, std::size_t n) {
  if (n < kMinCalibrationSamples) throw InsufficientCalibration("calibration needs at least 10 samples");
  double pitch_sum = 0.0, sin_sum = 0.0, cos_sum = 0.0;
  std::size_t used = 0;
  for (const auto& s : samples) {
    if (used == n) break;
    HeadPose p;
    try {
      p = pose_from_sample(s);
    } catch (const UnreliableSample&) {
      continue;
    }
    pitch_sum += p.pitch;
    sin_sum += std::sin(p.yaw * kDegToRad);
    cos_sum += std::cos(p.yaw * kDegToRad);
    ++used;
  }
  if (used < n)
    throw InsufficientCalibration("calibration got " + std::to_string(used) + " usable samples, needs " +
                                  std::to_string(n));
  return {pitch_sum / static_cast<double>(n), normalize_yaw(std::atan2(sin_sum, cos_sum) * kRadToDeg)};
}

}  // namespace teleop::telemetry
