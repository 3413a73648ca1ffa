#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace teleop::service {

enum class Stage { kBlur, kDetect, kClassify, kAnnotate, kSbs, kEncode, kEndToEnd };
inline constexpr std::array<std::string_view, 7> kStageNames = {"blur",     "detect", "classify",  "annotate",
                                                                "sbs",      "encode", "end_to_end"};
inline constexpr std::size_t kStageCount = kStageNames.size();

/// Nearest-rank percentile (q in (0, 1]) of `samples`; 0 when empty.
double percentile(std::vector<double> samples, double q);

struct StageSnapshot {
  std::uint64_t count = 0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
};

struct Counters {
  std::uint64_t frames_in = 0;
  std::uint64_t frames_out = 0;
  std::uint64_t frames_dropped = 0;
  std::uint64_t classifier_calls = 0;
  std::uint64_t classifier_failures = 0;
  std::uint64_t detections = 0;
  std::uint64_t backpressure_faults = 0;
  std::uint64_t robot_reconnects = 0;
  std::uint64_t robot_heartbeat_timeouts = 0;
  std::uint64_t console_connects = 0;
  std::uint64_t console_disconnects = 0;
  std::uint64_t protocol_errors = 0;
  std::uint64_t sequence_gaps = 0;

  bool operator==(const Counters&) const = default;
};

struct MetricsSnapshot {
  std::array<StageSnapshot, kStageCount> stages{};
  Counters counters;
  double input_fps = 0.0;
  double output_fps = 0.0;
  bool console_up = false;
  bool robot_up = false;

  const StageSnapshot& stage(Stage s) const { return stages[static_cast<std::size_t>(s)]; }
  /// `stage,count,p50_ms,p95_ms` lines with a header.
  std::string stage_csv() const;
  /// `counter,value` lines with a header.
  std::string counters_csv() const;
};

/// Thread-safe metrics sink. Latency samples are kept in a bounded ring per
/// stage; snapshot() is taken under one lock so it is internally consistent.
class ServiceMetrics {
 public:
  explicit ServiceMetrics(std::size_t window = 4096);

  void record(Stage s, double ms);
  template <typename F>
  void update(F&& f) {
    std::lock_guard lk(mu_);
    f(counters_);
  }
  void mark_input();
  void mark_output();
  void set_console_up(bool up);
  void set_robot_up(bool up);

  MetricsSnapshot snapshot() const;
  /// Writes stage_csv() to `path` and counters_csv() to `path` + ".counters".
  void write(const std::string& path) const;

 private:
  struct Ring {
    std::vector<double> samples;
    std::size_t next = 0;
    std::uint64_t count = 0;
  };
  using Clock = std::chrono::steady_clock;

  mutable std::mutex mu_;
  std::size_t window_;
  std::array<Ring, kStageCount> rings_;
  Counters counters_;
  std::optional<Clock::time_point> first_in_, last_in_, first_out_, last_out_;
  bool console_up_ = false;
  bool robot_up_ = false;
};

/// Wall-clock milliseconds since construction.
class StopWatch {
 public:
  StopWatch() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace teleop::service
