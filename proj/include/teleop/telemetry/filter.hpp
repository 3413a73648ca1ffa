#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "teleop/telemetry/imu.hpp"

namespace teleop::telemetry {

inline constexpr double kDefaultAlpha = 0.2;
inline constexpr double kSampleRateHz = 50.0;

/// Exponential moving average over (pitch, yaw). Yaw is filtered on the
/// unwrapped angle: each step moves by alpha times the shortest-arc delta.
struct LowPassState {
  double alpha = kDefaultAlpha;
  std::optional<HeadPose> current;  // empty until the first sample
};

/// First call initializes the state with `pose`; later calls apply y <- y + alpha * delta.
HeadPose low_pass_step(LowPassState& state, const HeadPose& pose);

inline constexpr double kPanLimit = 90.0;
inline constexpr double kTiltLimit = 45.0;

struct PanTiltCommand {
  double pan = 0.0;   // [-90, 90]
  double tilt = 0.0;  // [-45, 45]
  std::uint32_t seq = 0;
};

/// pan = clamp(yaw, +-90), tilt = clamp(pitch, +-45).
PanTiltCommand pose_to_pan_tilt(const HeadPose& pose, std::uint32_t seq = 0);

/// Operator-side head tracker: collects calibration samples, then turns every
/// reliable IMU sample into a calibrated, filtered pose. Unreliable samples are
/// dropped and the filter holds.
class HeadTracker {
 public:
  explicit HeadTracker(double alpha = kDefaultAlpha, std::size_t calibration_samples = kMinCalibrationSamples);

  /// Returns a pose once calibrated and the sample is usable.
  std::optional<HeadPose> push(const ImuSample& sample);

  bool calibrated() const { return offsets_.has_value(); }
  const std::optional<CalibrationOffsets>& offsets() const { return offsets_; }

 private:
  std::size_t calibration_samples_;
  std::vector<ImuSample> pending_;
  std::optional<CalibrationOffsets> offsets_;
  LowPassState filter_;
};

}  // namespace teleop::telemetry
