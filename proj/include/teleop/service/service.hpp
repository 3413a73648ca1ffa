#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "teleop/service/config.hpp"
#include "teleop/service/metrics.hpp"
#include "teleop/service/pipeline.hpp"
#include "teleop/transport/channel.hpp"
#include "teleop/transport/envelope.hpp"
#include "teleop/transport/socket.hpp"

namespace teleop::service {

/// Reconnect delays 1, 2, 4, ... seconds, capped.
class Backoff {
 public:
  explicit Backoff(std::chrono::seconds first = std::chrono::seconds(1),
                   std::chrono::seconds cap = std::chrono::seconds(30))
      : first_(first), cap_(cap), next_(first) {}
  std::chrono::seconds next();
  void reset() { next_ = first_; }

 private:
  std::chrono::seconds first_, cap_, next_;
};

inline constexpr double kHeartbeatHz = 1.0;
inline constexpr int kMissedHeartbeatsForTimeout = 3;

/// One console attached to the service: the service pushes annotated frames,
/// DETECTIONS and HEARTBEAT envelopes into `channel`; the transport owning the
/// subscription drains it.
struct ConsoleSubscription {
  explicit ConsoleSubscription(std::size_t media_depth, std::size_t watermark) : channel(media_depth, watermark) {}
  transport::OutboundChannel channel;
};

/// What a console transport needs from the service.
class ConsoleHub {
 public:
  virtual ~ConsoleHub() = default;
  virtual std::shared_ptr<ConsoleSubscription> subscribe() = 0;
  virtual void unsubscribe(const std::shared_ptr<ConsoleSubscription>& s) = 0;
  /// Forwards a console envelope to the robot unmodified. Only CONTROL and
  /// HEAD_POSE are accepted; returns false when rejected or the robot is down.
  virtual bool relay_to_robot(std::span<const std::uint8_t> envelope) = 0;
};

class ConsoleGateway;

/// The inference server: robot media in, pipeline, console feed out, console
/// commands relayed back to the robot.
class InferenceService : public ConsoleHub {
 public:
  /// Loads and validates every model; a bad model fails here.
  explicit InferenceService(ServiceConfig cfg);
  ~InferenceService() override;
  InferenceService(const InferenceService&) = delete;
  InferenceService& operator=(const InferenceService&) = delete;

  /// Binds the console listeners and starts all threads.
  void start();
  /// Stops threads and writes the metrics file. Safe to call more than once.
  void stop();

  std::uint16_t console_port() const;
  std::uint16_t http_port() const;
  bool robot_connected() const { return robot_up_; }
  ServiceMetrics& metrics() { return metrics_; }
  const ServiceConfig& config() const { return cfg_; }

  std::shared_ptr<ConsoleSubscription> subscribe() override;
  void unsubscribe(const std::shared_ptr<ConsoleSubscription>& s) override;
  bool relay_to_robot(std::span<const std::uint8_t> envelope) override;

 private:
  struct Stages;
  struct TcpConsole;

  void robot_loop();
  void robot_session(transport::EnvelopeConnection& media, const std::shared_ptr<transport::EnvelopeConnection>& control);
  void detect_loop();
  void classify_loop();
  void output_loop();
  void console_accept_loop();
  void heartbeat_loop();
  void publish(transport::MessageType type, std::vector<std::uint8_t> envelope, std::uint32_t seq);
  void publish_heartbeat(const std::optional<transport::RobotStatus>& status);
  bool sleep_for(std::chrono::milliseconds d);

  ServiceConfig cfg_;
  Pipeline pipeline_;
  ServiceMetrics metrics_;

  std::atomic<bool> running_{false};
  std::atomic<bool> robot_up_{false};
  std::mutex sleep_mu_;
  std::condition_variable sleep_cv_;

  std::unique_ptr<Stages> stages_;

  std::mutex seq_mu_;
  transport::Sequencer seq_;

  std::mutex subs_mu_;
  std::vector<std::shared_ptr<ConsoleSubscription>> subs_;

  std::mutex robot_mu_;
  std::shared_ptr<transport::EnvelopeConnection> robot_control_;
  std::optional<transport::RobotStatus> last_status_;

  std::unique_ptr<transport::Listener> console_listener_;
  std::mutex consoles_mu_;
  std::vector<std::shared_ptr<TcpConsole>> consoles_;
  std::unique_ptr<ConsoleGateway> gateway_;

  std::vector<std::thread> threads_;
};

}  // namespace teleop::service
