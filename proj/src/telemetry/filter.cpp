#include "teleop/telemetry/filter.hpp"

#include <algorithm>

namespace teleop::telemetry {

HeadPose low_pass_step(LowPassState& state, const HeadPose& pose) {
  if (!(state.alpha > 0.0 && state.alpha <= 1.0)) throw InvalidParameter("low-pass alpha must be in (0, 1]");
  if (!state.current) {
    state.current = pose;
    return pose;
  }
  HeadPose& y = *state.current;
  y.pitch += state.alpha * (pose.pitch - y.pitch);
  y.yaw = normalize_yaw(y.yaw + state.alpha * shortest_arc(y.yaw, pose.yaw));
  y.timestamp_us = pose.timestamp_us;
  return y;
}

PanTiltCommand pose_to_pan_tilt(const HeadPose& pose, std::uint32_t seq) {
  return {std::clamp(pose.yaw, -kPanLimit, kPanLimit), std::clamp(pose.pitch, -kTiltLimit, kTiltLimit), seq};
}

HeadTracker::HeadTracker(double alpha, std::size_t calibration_samples)
    : calibration_samples_(calibration_samples) {
  filter_.alpha = alpha;
}

std::optional<HeadPose> HeadTracker::push(const ImuSample& sample) {
  if (!offsets_) {
    pending_.push_back(sample);
    try {
      offsets_ = calibrate(pending_, calibration_samples_);
      pending_.clear();
    } catch (const InsufficientCalibration&) {
      if (calibration_samples_ < kMinCalibrationSamples) throw;
    }
    return std::nullopt;
  }
  HeadPose raw;
  try {
    raw = pose_from_sample(sample);
  } catch (const UnreliableSample&) {
    return std::nullopt;
  }
  return low_pass_step(filter_, offsets_->apply(raw));
}

}  // namespace teleop::telemetry
