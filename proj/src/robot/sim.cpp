#include "teleop/robot/sim.hpp"

#include <algorithm>
#include <cmath>

#include "teleop/telemetry/head_pose.hpp"
#include "teleop/telemetry/link_frame.hpp"

namespace teleop::robot {

void ServoAxis::set_target(double t) { target = std::clamp(t, min, max); }

void ServoAxis::step(double dt) {
  const double max_move = slew * dt;
  position = std::clamp(position + std::clamp(target - position, -max_move, max_move), min, max);
}

Simulator::Simulator(Scene scene, GroundPose start, double fps) : scene_(std::move(scene)), fps_(fps) {
  scene_.validate();
  if (!(fps > 0)) throw InvalidParameter("fps must be positive");
  cam_.ugv = start;
  cam_.uav = {start.x, start.y, kDefaultUavAltitude, start.heading};
}

void Simulator::apply(const transport::Control& c, std::uint32_t seq) {
  last_control_seq_ = seq;
  switch (c.command) {
    case transport::ControlCommand::kModeSwitch: pending_mode_ = c.mode; break;
    case transport::ControlCommand::kDrive:
      if (!estop_) {
        left_ = c.left;
        right_ = c.right;
      }
      break;
    case transport::ControlCommand::kEStop:
      estop_ = true;
      left_ = right_ = 0;
      break;
    case transport::ControlCommand::kEStopRelease: estop_ = false; break;
  }
}

void Simulator::apply(const telemetry::PanTiltCommand& cmd) {
  servos_.pan.set_target(cmd.pan);
  servos_.tilt.set_target(cmd.tilt);
}

bool Simulator::apply_head_pose_frame(std::span<const std::uint8_t> link_frame) {
  try {
    const auto msg = telemetry::parse_head_pose(telemetry::decode_link_frame(link_frame));
    apply(telemetry::pose_to_pan_tilt(msg.pose, msg.seq));
    return true;
  } catch (const Error&) {
    return false;
  }
}

void Simulator::drive(double dt) {
  // In UAV mode the same wheel commands translate the aircraft.
  double& x = cam_.mode == RobotMode::kUgv ? cam_.ugv.x : cam_.uav.x;
  double& y = cam_.mode == RobotMode::kUgv ? cam_.ugv.y : cam_.uav.y;
  double& heading = cam_.mode == RobotMode::kUgv ? cam_.ugv.heading : cam_.uav.heading;
  const double vl = kMaxWheelSpeed * left_ / 127.0;
  const double vr = kMaxWheelSpeed * right_ / 127.0;
  const double v = (vl + vr) / 2;
  const double w = (vr - vl) / kWheelBase;
  x += v * std::cos(heading) * dt;
  y += v * std::sin(heading) * dt;
  heading += w * dt;
  if (cam_.mode == RobotMode::kUgv) {
    x = std::clamp(x, scene_.bounds.xmin, scene_.bounds.xmax);
    y = std::clamp(y, scene_.bounds.ymin, scene_.bounds.ymax);
  }
}

void Simulator::step(double dt) {
  if (!(dt > 0)) throw InvalidParameter("dt must be positive");
  servos_.step(dt);
  if (!estop_) drive(dt);
  cam_.pan = servos_.pan.position;
  cam_.tilt = servos_.tilt.position;
}

SimFrame Simulator::next_frame(bool render) {
  if (pending_mode_) {
    cam_.mode = *pending_mode_;
    pending_mode_.reset();
  }
  SimFrame f;
  f.index = frame_;
  f.timestamp_us = static_cast<std::uint64_t>(std::llround(frame_ * 1e6 / fps_));
  f.camera = cam_;
  if (render) f.image = render_frame(scene_, cam_);
  ++frame_;
  step(1.0 / fps_);
  return f;
}

transport::RobotStatus Simulator::status() const {
  transport::RobotStatus s;
  s.mode = cam_.mode;
  s.estop = estop_;
  s.pan_cdeg = static_cast<std::int16_t>(std::lround(cam_.pan * 100));
  s.tilt_cdeg = static_cast<std::int16_t>(std::lround(cam_.tilt * 100));
  s.frame_index = frame_;
  s.last_control_seq = last_control_seq_;
  return s;
}

}  // namespace teleop::robot
