#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "teleop/error.hpp"

namespace teleop::telemetry {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct ImuSample {
  Vec3 accel;  // g
  Vec3 mag;    // microtesla
  std::uint64_t timestamp_us = 0;
};

/// Head orientation in degrees: pitch in [-90, 90], yaw in (-180, 180].
struct HeadPose {
  double pitch = 0.0;
  double yaw = 0.0;
  std::uint64_t timestamp_us = 0;
};

/// Reading that cannot yield an angle (free fall, degenerate field). The
/// caller skips the sample and the filter holds its last output.
class UnreliableSample : public Error {
 public:
  using Error::Error;
};

class InsufficientCalibration : public Error {
 public:
  using Error::Error;
};

inline constexpr double kMinAccelMagnitude = 0.5;       // g
inline constexpr double kMinHorizontalField = 1e-3;     // microtesla

/// Wraps an angle into (-180, 180].
double normalize_yaw(double degrees);
/// Signed shortest-arc difference `to - from`, in (-180, 180].
double shortest_arc(double from, double to);

/// atan2(-ax, sqrt(ay^2 + az^2)) in degrees.
double pitch_from_accel(const Vec3& accel);
/// atan2(-my, mx) in degrees, normalized to (-180, 180]. The vertical field
/// component is ignored: the head is assumed level (no tilt compensation).
double yaw_from_mag(const Vec3& mag);

HeadPose pose_from_sample(const ImuSample& s);

/// Rest orientation captured at initialization; poses are reported relative to it.
struct CalibrationOffsets {
  double pitch = 0.0;
  double yaw = 0.0;

  HeadPose apply(const HeadPose& p) const;
};

inline constexpr std::size_t kMinCalibrationSamples = 10;

/// Mean pitch and circular-mean yaw over the first `n` reliable samples.
/// Throws InsufficientCalibration when n < 10 or fewer than n samples are usable.
CalibrationOffsets calibrate(std::span<const ImuSample> samples, std::size_t n = kMinCalibrationSamples);

}  // namespace teleop::telemetry
