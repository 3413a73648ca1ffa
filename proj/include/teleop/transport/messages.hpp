#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "teleop/transport/errors.hpp"

namespace teleop::transport {

enum class MessageType : std::uint8_t {
  kVideoFrame = 0x01,
  kDetections = 0x02,
  kControl = 0x03,
  kHeadPose = 0x04,
  kHeartbeat = 0x05,
};

bool is_known_type(std::uint8_t t);

// Envelope flag bits.
inline constexpr std::uint8_t kFlagSbs = 0x01;  // VIDEO_FRAME holds a half-SBS formatted frame

enum class PixelFormat : std::uint8_t { kGray8 = 0x01, kRgb8 = 0x03 };
enum class FrameEncoding : std::uint8_t { kRaw = 0x00, kRle = 0x01 };

inline int channels(PixelFormat f) { return static_cast<int>(f); }

/// Pixels are always held decoded; `encoding` selects the wire form.
struct VideoFrame {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  PixelFormat format = PixelFormat::kRgb8;
  FrameEncoding encoding = FrameEncoding::kRaw;
  std::vector<std::uint8_t> pixels;

  bool operator==(const VideoFrame&) const = default;
};

enum class WireVerdict : std::uint8_t { kGreen = 0, kRed = 1, kUnknown = 2 };
inline constexpr std::uint8_t kUnknownLabel = 0xFF;

struct DetectionRecord {
  std::uint16_t x = 0, y = 0, w = 0, h = 0;
  float person_score = 0.f;
  float threat_probability = 0.f;
  WireVerdict verdict = WireVerdict::kUnknown;
  std::uint8_t percent = 0;
  std::uint8_t label = kUnknownLabel;  // index into the canonical class set

  bool operator==(const DetectionRecord&) const = default;
};

struct Detections {
  std::uint32_t frame_seq = 0;  // sequence of the VIDEO_FRAME these annotate
  std::vector<DetectionRecord> items;

  bool operator==(const Detections&) const = default;
};

enum class RobotMode : std::uint8_t { kUgv = 0, kUav = 1 };

enum class ControlCommand : std::uint8_t {
  kModeSwitch = 0x01,
  kDrive = 0x02,
  kEStop = 0x03,
  kEStopRelease = 0x04,
};

struct Control {
  ControlCommand command = ControlCommand::kEStop;
  RobotMode mode = RobotMode::kUgv;  // kModeSwitch only
  std::int8_t left = 0;              // kDrive only, normalized wheel speeds
  std::int8_t right = 0;

  bool operator==(const Control&) const = default;
};

/// Carries one complete head-tracking link frame (start byte through checksum).
struct HeadPoseRelay {
  std::vector<std::uint8_t> link_frame;

  bool operator==(const HeadPoseRelay&) const = default;
};

/// Robot state echo, attached to robot heartbeats.
struct RobotStatus {
  RobotMode mode = RobotMode::kUgv;
  bool estop = false;
  std::int16_t pan_cdeg = 0;
  std::int16_t tilt_cdeg = 0;
  std::uint32_t frame_index = 0;
  std::uint32_t last_control_seq = 0;

  bool operator==(const RobotStatus&) const = default;
};

struct Heartbeat {
  std::optional<RobotStatus> status;

  bool operator==(const Heartbeat&) const = default;
};

using Body = std::variant<VideoFrame, Detections, Control, HeadPoseRelay, Heartbeat>;

MessageType type_of(const Body& body);

struct Message {
  std::uint8_t flags = 0;
  std::uint32_t sequence = 0;
  std::uint64_t timestamp_us = 0;
  Body body;

  MessageType type() const { return type_of(body); }
  bool operator==(const Message&) const = default;
};

/// Typed payload codecs. `base_offset` positions errors within the envelope.
std::vector<std::uint8_t> encode_body(const Body& body);
Body decode_body(MessageType type, std::span<const std::uint8_t> payload, std::size_t base_offset = 0);

/// Pixel run-length coding: repeated (count u8 in 1..255, one pixel of `channels` bytes).
std::vector<std::uint8_t> rle_encode(std::span<const std::uint8_t> pixels, int channels);
std::vector<std::uint8_t> rle_decode(std::span<const std::uint8_t> data, int channels, std::size_t pixel_count,
                                     std::size_t base_offset = 0);

}  // namespace teleop::transport
