#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "teleop/error.hpp"
#include "teleop/telemetry/imu.hpp"

namespace teleop::telemetry {

// Head-pose payload carried inside a link frame (9 bytes, big-endian):
//   0x10 | pitch i16 centidegrees | yaw i16 centidegrees | seq u32
inline constexpr std::uint8_t kHeadPoseType = 0x10;
inline constexpr std::size_t kHeadPosePayloadSize = 9;

class HeadPosePayloadError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct HeadPoseMessage {
  HeadPose pose;
  std::uint32_t seq = 0;
};

/// Angles rounded to the nearest 0.01 degree. Throws InvalidInput when the
/// pose is outside pitch [-90, 90] / yaw (-180, 180].
std::vector<std::uint8_t> head_pose_payload(const HeadPose& pose, std::uint32_t seq);

/// Inverse of head_pose_payload; rejects an unknown type byte or wrong length.
HeadPoseMessage parse_head_pose(std::span<const std::uint8_t> payload);

}  // namespace teleop::telemetry
