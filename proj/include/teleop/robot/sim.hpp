#pragma once

#include <cstdint>
#include <optional>

#include "teleop/robot/render.hpp"
#include "teleop/telemetry/filter.hpp"
#include "teleop/transport/messages.hpp"

namespace teleop::robot {

inline constexpr double kSlewLimit = 300.0;   // degrees per second
inline constexpr double kMaxWheelSpeed = 1.0; // m/s at |command| = 127
inline constexpr double kWheelBase = 0.5;     // m
inline constexpr double kDefaultFps = 30.0;

/// One rate-limited servo axis.
struct ServoAxis {
  double position = 0.0;
  double target = 0.0;
  double min = -90.0, max = 90.0;
  double slew = kSlewLimit;

  void set_target(double t);
  void step(double dt);
};

struct ServoModel {
  ServoAxis pan{0.0, 0.0, -telemetry::kPanLimit, telemetry::kPanLimit};
  ServoAxis tilt{0.0, 0.0, -telemetry::kTiltLimit, telemetry::kTiltLimit};

  void step(double dt) {
    pan.step(dt);
    tilt.step(dt);
  }
};

struct SimFrame {
  std::uint32_t index = 0;  // 0-based frame counter
  std::uint64_t timestamp_us = 0;
  CameraState camera;       // state the frame was rendered with
  vision::RgbImage image;
};

/// Deterministic robot: camera servos, differential drive, mode switch and
/// e-stop. Not thread-safe; the network server owns one on its stepping thread.
class Simulator {
 public:
  explicit Simulator(Scene scene, GroundPose start = {}, double fps = kDefaultFps);

  /// Applies a CONTROL command. Mode switches are deferred to the next frame boundary.
  void apply(const transport::Control& c, std::uint32_t seq = 0);
  /// Sets servo targets from a head pan-tilt command (already clamped).
  void apply(const telemetry::PanTiltCommand& cmd);
  /// Decodes a relayed head-pose link frame; returns false if it does not verify.
  bool apply_head_pose_frame(std::span<const std::uint8_t> link_frame);

  /// Physics only: servos and drive over `dt` seconds.
  void step(double dt);
  /// Frame boundary: applies a pending mode switch, renders, then advances one
  /// frame period.
  SimFrame next_frame(bool render = true);

  const Scene& scene() const { return scene_; }
  const CameraState& camera() const { return cam_; }
  const ServoModel& servos() const { return servos_; }
  bool estopped() const { return estop_; }
  std::int8_t left_cmd() const { return left_; }
  std::int8_t right_cmd() const { return right_; }
  std::uint32_t frame_index() const { return frame_; }
  double fps() const { return fps_; }
  transport::RobotStatus status() const;

 private:
  void drive(double dt);

  Scene scene_;
  CameraState cam_;
  ServoModel servos_;
  double fps_;
  std::optional<RobotMode> pending_mode_;
  bool estop_ = false;
  std::int8_t left_ = 0, right_ = 0;
  std::uint32_t frame_ = 0;
  std::uint32_t last_control_seq_ = 0;
};

}  // namespace teleop::robot
