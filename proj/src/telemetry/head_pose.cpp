#include "teleop/telemetry/head_pose.hpp"

#include <cmath>

namespace teleop::telemetry {

namespace {

std::int16_t to_centidegrees(double deg) { return static_cast<std::int16_t>(std::lround(deg * 100.0)); }

void put_i16(std::vector<std::uint8_t>& out, std::int16_t v) {
  const auto u = static_cast<std::uint16_t>(v);
  out.push_back(static_cast<std::uint8_t>(u >> 8));
  out.push_back(static_cast<std::uint8_t>(u & 0xFF));
}

std::int16_t get_i16(const std::uint8_t* p) { return static_cast<std::int16_t>((p[0] << 8) | p[1]); }

}  // namespace

std::vector<std::uint8_t> head_pose_payload(const HeadPose& pose, std::uint32_t seq) {
  if (!(pose.pitch >= -90.0 && pose.pitch <= 90.0)) throw InvalidInput("head pose pitch outside [-90, 90]");
  if (!(pose.yaw > -180.0 && pose.yaw <= 180.0)) throw InvalidInput("head pose yaw outside (-180, 180]");
  std::vector<std::uint8_t> out;
  out.reserve(kHeadPosePayloadSize);
  out.push_back(kHeadPoseType);
  put_i16(out, to_centidegrees(pose.pitch));
  put_i16(out, to_centidegrees(pose.yaw));
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(seq >> shift));
  return out;
}

HeadPoseMessage parse_head_pose(std::span<const std::uint8_t> p) {
  if (p.empty() || p[0] != kHeadPoseType) throw HeadPosePayloadError("head pose payload: unknown type byte");
  if (p.size() != kHeadPosePayloadSize) throw HeadPosePayloadError("head pose payload: wrong length");
  HeadPoseMessage m;
  m.pose.pitch = get_i16(p.data() + 1) / 100.0;
  m.pose.yaw = get_i16(p.data() + 3) / 100.0;
  m.seq = (static_cast<std::uint32_t>(p[5]) << 24) | (static_cast<std::uint32_t>(p[6]) << 16) |
          (static_cast<std::uint32_t>(p[7]) << 8) | p[8];
  return m;
}

}  // namespace teleop::telemetry
