#include "teleop/service/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "teleop/error.hpp"

namespace teleop::service {

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * samples.size()));
  return samples[std::clamp<std::size_t>(rank, 1, samples.size()) - 1];
}

std::string MetricsSnapshot::stage_csv() const {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(3);
  o << "stage,count,p50_ms,p95_ms\n";
  for (std::size_t i = 0; i < kStageCount; ++i)
    o << kStageNames[i] << ',' << stages[i].count << ',' << stages[i].p50_ms << ',' << stages[i].p95_ms << '\n';
  return o.str();
}

std::string MetricsSnapshot::counters_csv() const {
  const auto& c = counters;
  std::ostringstream o;
  o << "counter,value\n"
    << "frames_in," << c.frames_in << '\n'
    << "frames_out," << c.frames_out << '\n'
    << "frames_dropped," << c.frames_dropped << '\n'
    << "classifier_calls," << c.classifier_calls << '\n'
    << "classifier_failures," << c.classifier_failures << '\n'
    << "detections," << c.detections << '\n'
    << "backpressure_faults," << c.backpressure_faults << '\n'
    << "robot_reconnects," << c.robot_reconnects << '\n'
    << "robot_heartbeat_timeouts," << c.robot_heartbeat_timeouts << '\n'
    << "console_connects," << c.console_connects << '\n'
    << "console_disconnects," << c.console_disconnects << '\n'
    << "protocol_errors," << c.protocol_errors << '\n'
    << "sequence_gaps," << c.sequence_gaps << '\n'
    << "console_up," << (console_up ? 1 : 0) << '\n'
    << "robot_up," << (robot_up ? 1 : 0) << '\n';
  o.setf(std::ios::fixed);
  o.precision(2);
  o << "input_fps," << input_fps << '\n' << "output_fps," << output_fps << '\n';
  return o.str();
}

ServiceMetrics::ServiceMetrics(std::size_t window) : window_(window) {
  if (window == 0) throw InvalidParameter("metrics window must be positive");
}

void ServiceMetrics::record(Stage s, double ms) {
  std::lock_guard lk(mu_);
  auto& r = rings_[static_cast<std::size_t>(s)];
  if (r.samples.size() < window_) {
    r.samples.push_back(ms);
  } else {
    r.samples[r.next] = ms;
    r.next = (r.next + 1) % window_;
  }
  ++r.count;
}

void ServiceMetrics::mark_input() {
  std::lock_guard lk(mu_);
  const auto now = Clock::now();
  if (!first_in_) first_in_ = now;
  last_in_ = now;
  ++counters_.frames_in;
}

void ServiceMetrics::mark_output() {
  std::lock_guard lk(mu_);
  const auto now = Clock::now();
  if (!first_out_) first_out_ = now;
  last_out_ = now;
  ++counters_.frames_out;
}

void ServiceMetrics::set_console_up(bool up) {
  std::lock_guard lk(mu_);
  console_up_ = up;
}

void ServiceMetrics::set_robot_up(bool up) {
  std::lock_guard lk(mu_);
  robot_up_ = up;
}

MetricsSnapshot ServiceMetrics::snapshot() const {
  std::lock_guard lk(mu_);
  MetricsSnapshot s;
  for (std::size_t i = 0; i < kStageCount; ++i) {
    s.stages[i].count = rings_[i].count;
    s.stages[i].p50_ms = percentile(rings_[i].samples, 0.50);
    s.stages[i].p95_ms = percentile(rings_[i].samples, 0.95);
  }
  s.counters = counters_;
  auto rate = [](std::uint64_t n, const auto& a, const auto& b) {
    if (!a || !b || n < 2) return 0.0;
    const double secs = std::chrono::duration<double>(*b - *a).count();
    return secs > 0 ? (n - 1) / secs : 0.0;
  };
  s.input_fps = rate(counters_.frames_in, first_in_, last_in_);
  s.output_fps = rate(counters_.frames_out, first_out_, last_out_);
  s.console_up = console_up_;
  s.robot_up = robot_up_;
  return s;
}

void ServiceMetrics::write(const std::string& path) const {
  const auto s = snapshot();
  std::ofstream a(path), b(path + ".counters");
  if (!a || !b) throw InvalidInput("cannot write metrics to " + path);
  a << s.stage_csv();
  b << s.counters_csv();
}

}  // namespace teleop::service
