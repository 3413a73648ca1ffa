#include "teleop/transport/channel.hpp"

#include <algorithm>

namespace teleop::transport {

OutboundChannel::OutboundChannel(std::size_t media_capacity, std::size_t control_watermark)
    : media_(media_capacity), watermark_(control_watermark) {
  if (control_watermark == 0) throw InvalidParameter("control watermark must be at least 1");
}

PushResult OutboundChannel::push(OutboundItem item) {
  PushResult r = PushResult::kQueued;
  {
    std::lock_guard lk(mu_);
    if (closed_) return PushResult::kClosed;
    if (item.type == MessageType::kVideoFrame) {
      ++metrics_.media_enqueued;
      if (media_.push(std::move(item))) {
        ++metrics_.media_dropped;
        r = PushResult::kDroppedOldest;
      }
    } else {
      if (control_.size() >= watermark_) {
        ++metrics_.backpressure_faults;
        r = PushResult::kOverWatermark;
      }
      control_.push_back(std::move(item));
      ++metrics_.control_enqueued;
      metrics_.control_high_water = std::max(metrics_.control_high_water, control_.size());
    }
  }
  cv_.notify_one();
  return r;
}

std::optional<OutboundItem> OutboundChannel::take_locked() {
  if (!control_.empty()) {
    OutboundItem v = std::move(control_.front());
    control_.pop_front();
    ++metrics_.control_sent;
    return v;
  }
  auto v = media_.pop();
  if (v) ++metrics_.media_sent;
  return v;
}

std::optional<OutboundItem> OutboundChannel::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lk(mu_);
  cv_.wait_for(lk, timeout, [&] { return closed_ || !control_.empty() || !media_.empty(); });
  if (closed_) return std::nullopt;
  return take_locked();
}

std::optional<OutboundItem> OutboundChannel::try_pop() {
  std::lock_guard lk(mu_);
  if (closed_) return std::nullopt;
  return take_locked();
}

void OutboundChannel::close() {
  {
    std::lock_guard lk(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool OutboundChannel::closed() const {
  std::lock_guard lk(mu_);
  return closed_;
}

ChannelMetrics OutboundChannel::metrics() const {
  std::lock_guard lk(mu_);
  return metrics_;
}

}  // namespace teleop::transport
