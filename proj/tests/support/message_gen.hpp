#pragma once
// Random well-formed messages for round-trip and corruption tests.
#include <random>

#include "teleop/telemetry/head_pose.hpp"
#include "teleop/telemetry/link_frame.hpp"
#include "teleop/transport/messages.hpp"

namespace gen {

using namespace teleop::transport;
namespace telemetry = teleop::telemetry;

inline constexpr MessageType kAllTypes[] = {MessageType::kVideoFrame, MessageType::kDetections,
                                            MessageType::kControl, MessageType::kHeadPose,
                                            MessageType::kHeartbeat};

inline Body random_body(std::mt19937_64& rng, MessageType t) {
  switch (t) {
    case MessageType::kVideoFrame: {
      VideoFrame f;
      f.width = static_cast<std::uint16_t>(1 + rng() % 12);
      f.height = static_cast<std::uint16_t>(1 + rng() % 9);
      f.format = rng() % 2 ? PixelFormat::kRgb8 : PixelFormat::kGray8;
      f.encoding = rng() % 2 ? FrameEncoding::kRle : FrameEncoding::kRaw;
      f.pixels.resize(static_cast<std::size_t>(f.width) * f.height * channels(f.format));
      // Few distinct values so RLE runs actually form.
      for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng() % 3 * 100);
      return f;
    }
    case MessageType::kDetections: {
      Detections d;
      d.frame_seq = static_cast<std::uint32_t>(rng());
      for (std::size_t i = rng() % 5; i > 0; --i) {
        DetectionRecord r;
        r.x = static_cast<std::uint16_t>(rng());
        r.y = static_cast<std::uint16_t>(rng());
        r.w = static_cast<std::uint16_t>(rng());
        r.h = static_cast<std::uint16_t>(rng());
        r.person_score = static_cast<float>(rng() % 1000) / 7.f;
        r.threat_probability = static_cast<float>(rng() % 101) / 100.f;
        r.verdict = static_cast<WireVerdict>(rng() % 3);
        r.percent = static_cast<std::uint8_t>(rng() % 101);
        r.label = rng() % 4 == 0 ? kUnknownLabel : static_cast<std::uint8_t>(rng() % 8);
        d.items.push_back(r);
      }
      return d;
    }
    case MessageType::kControl: {
      Control c;
      c.command = static_cast<ControlCommand>(1 + rng() % 4);
      if (c.command == ControlCommand::kModeSwitch) c.mode = rng() % 2 ? RobotMode::kUav : RobotMode::kUgv;
      if (c.command == ControlCommand::kDrive) {
        c.left = static_cast<std::int8_t>(static_cast<int>(rng() % 201) - 100);
        c.right = static_cast<std::int8_t>(static_cast<int>(rng() % 201) - 100);
      }
      return c;
    }
    case MessageType::kHeadPose: {
      const telemetry::HeadPose pose{static_cast<int>(rng() % 18001) / 100.0 - 90.0,
                                     (static_cast<int>(rng() % 36000) - 17999) / 100.0, 0};
      return HeadPoseRelay{
          telemetry::encode_link_frame(telemetry::head_pose_payload(pose, static_cast<std::uint32_t>(rng())))};
    }
    case MessageType::kHeartbeat: {
      Heartbeat h;
      if (rng() % 2) {
        RobotStatus s;
        s.mode = rng() % 2 ? RobotMode::kUav : RobotMode::kUgv;
        s.estop = rng() % 2;
        s.pan_cdeg = static_cast<std::int16_t>(static_cast<int>(rng() % 18001) - 9000);
        s.tilt_cdeg = static_cast<std::int16_t>(static_cast<int>(rng() % 9001) - 4500);
        s.frame_index = static_cast<std::uint32_t>(rng());
        s.last_control_seq = static_cast<std::uint32_t>(rng());
        h.status = s;
      }
      return h;
    }
  }
  return Heartbeat{};
}

inline Message random_message(std::mt19937_64& rng, MessageType t) {
  Message m;
  m.flags = t == MessageType::kVideoFrame && rng() % 2 ? kFlagSbs : 0;
  m.sequence = static_cast<std::uint32_t>(rng());
  m.timestamp_us = rng();
  m.body = random_body(rng, t);
  return m;
}

}  // namespace gen
