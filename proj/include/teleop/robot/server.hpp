#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>
#include <variant>
#include <vector>

#include "teleop/robot/sim.hpp"
#include "teleop/transport/channel.hpp"
#include "teleop/transport/socket.hpp"

namespace teleop::robot {

struct RobotServerOptions {
  transport::Endpoint media{"", 7701};
  transport::Endpoint control{"", 7702};
  double fps = kDefaultFps;
  transport::FrameEncoding encoding = transport::FrameEncoding::kRle;
  std::size_t media_queue = 2;  // per-subscriber latest-wins depth
  double heartbeat_hz = 1.0;
};

struct RobotServerStats {
  std::uint64_t frames = 0;
  std::uint64_t controls = 0;
  std::uint64_t head_poses = 0;
  std::uint64_t rejected_head_poses = 0;
  std::uint64_t media_dropped = 0;
  std::uint64_t protocol_errors = 0;
};

/// Network front end of the simulator. Media subscribers receive VIDEO_FRAME
/// and status HEARTBEAT envelopes; control clients send CONTROL and HEAD_POSE
/// and receive status heartbeats (once per second and right after each frame
/// boundary at which a CONTROL took effect). The simulator is touched only by
/// the stepping thread; network threads hand commands over through an inbox.
class RobotServer {
 public:
  RobotServer(Simulator sim, RobotServerOptions opts);
  ~RobotServer();
  RobotServer(const RobotServer&) = delete;
  RobotServer& operator=(const RobotServer&) = delete;

  /// Binds both listeners (throws NetworkError) and starts the threads.
  void start();
  void stop();
  bool running() const { return running_; }

  std::uint16_t media_port() const;
  std::uint16_t control_port() const;
  RobotServerStats stats() const;
  transport::RobotStatus status() const;

 private:
  struct Subscriber {
    explicit Subscriber(transport::Socket s, std::size_t depth) : conn(std::move(s)), queue(depth) {}
    transport::EnvelopeConnection conn;
    transport::OutboundChannel queue;
    std::atomic<bool> alive{true};
    std::thread writer;
    std::thread reader;
  };
  using Command = std::variant<std::pair<transport::Control, std::uint32_t>, std::vector<std::uint8_t>>;

  void accept_loop();
  void step_loop();
  void write_loop(Subscriber& s);
  void read_loop(Subscriber& s);
  void broadcast(const transport::OutboundItem& item, bool media_only);

  Simulator sim_;
  RobotServerOptions opts_;
  std::unique_ptr<transport::Listener> media_listener_, control_listener_;
  std::atomic<bool> running_{false};
  std::thread accept_thread_, step_thread_;

  mutable std::mutex subs_mu_;
  std::vector<std::shared_ptr<Subscriber>> media_subs_, control_subs_;

  std::mutex inbox_mu_;
  std::deque<Command> inbox_;

  mutable std::mutex state_mu_;
  RobotServerStats stats_;
  transport::RobotStatus status_;
};

}  // namespace teleop::robot
